// Times the OpenMP scenario runner against the serial reference and checks
// that both produce identical reports.

#include <chrono>
#include <iostream>

#include "wprior/sim.hpp"

using namespace wprior;
using clock_type = std::chrono::steady_clock;

namespace {

double seconds_since(clock_type::time_point start) {
  return std::chrono::duration<double>(clock_type::now() - start).count();
}

}  // namespace

int main(int argc, char** argv) {
  Scenario sc;
  sc.kind = ScenarioKind::Regression;
  sc.truth = {1.0, 0.0, 0.5, 1.0, 0.5};
  sc.priors = {PriorKind::Wasserstein};
  sc.sample_sizes = {50};
  sc.replicates = argc > 1 ? static_cast<std::size_t>(std::stoul(argv[1])) : 16;
  sc.mcmc.iterations = 6000;
  sc.mcmc.burnin = 1000;
  sc.mcmc.thinning = 5;
  sc.seed = 20240817;

  std::cout << "regression scenario, " << sc.replicates << " replicates, n="
            << sc.sample_sizes[0] << ", " << sc.mcmc.iterations
            << " iterations per chain\n";

  auto t0 = clock_type::now();
  const ScenarioReport serial = run_scenario_serial(sc);
  const double t_serial = seconds_since(t0);
  std::cout << "serial reference: " << t_serial << " s\n";

  t0 = clock_type::now();
  const ScenarioReport parallel = run_scenario(sc);
  const double t_parallel = seconds_since(t0);
  std::cout << "openmp:           " << t_parallel << " s  (speedup "
            << t_serial / t_parallel << "x)\n";

  if (!reports_equal(serial, parallel)) {
    std::cout << "ERROR: serial and parallel reports differ\n";
    return 1;
  }
  std::cout << "reports identical\n";
  return 0;
}
