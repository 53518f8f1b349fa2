// Draws a dependent toroidal sample and runs the kernel battery on it.

#include <cstdio>

#include "dirdep/dirdep.hpp"

int main() {
  using namespace dirdep;
  SampleEngine engine(derive_seed(2024, 0));
  const auto model = parse_model("BvM(0.5)");
  const auto sample = sample_joint(model, 50, engine);

  const auto specs = circular_battery();
  const auto results = test_independence(specs, sample.x, sample.y, 999, 7);
  std::printf("model %s, n=%zu\n", model.to_string().c_str(), sample.x.size());
  for (std::size_t k = 0; k < specs.size(); ++k) {
    std::printf("  %-6s  T=%-12.6g p=%.4f\n", specs[k].label().c_str(), results[k].statistic,
                results[k].p_value);
  }
}
