// Writes the synthetic dog dataset used by the CLI tests.
//   make_dataset <dir> [seed] [noise_sigma] [max_rotation]

#include <cstdio>
#include <cstdlib>

#include "support/synthetic.hpp"

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: %s <dir> [seed] [noise_sigma] [max_rotation]\n", argv[0]);
    return 2;
  }
  dogid::testing::DatasetSpec spec;
  spec.images_per_identity = 5;
  spec.side = 48;
  if (argc > 2) spec.seed = std::strtoull(argv[2], nullptr, 10);
  if (argc > 3) spec.noise_sigma = std::strtod(argv[3], nullptr);
  if (argc > 4) spec.max_rotation = std::strtod(argv[4], nullptr);
  dogid::testing::write_dog_dataset(argv[1], spec);
  return 0;
}
