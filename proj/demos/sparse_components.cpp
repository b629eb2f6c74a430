// In the sparse regime nearly every point is its own component, and the
// number of isolated edges tracks the number of edges.
#include <iostream>

#include "rgc/experiments.hpp"

using namespace rgc;

int main() {
  ExperimentPlan p;
  p.regime = Regime::sparse;
  p.radius = RadiusRule::power(2, 0.5);
  p.n_grid = {1000, 4000};
  p.statistics = {"betti_cech:0", "G:edge", "J:edge"};
  p.replicates = 20;
  p.seed = 5;
  for (const auto& rec : run(p))
    std::cout << "n=" << rec.n << " r=" << rec.r << " " << rec.statistic << " mean " << rec.mean << " +- "
              << rec.ci_half_width << "\n";
}
