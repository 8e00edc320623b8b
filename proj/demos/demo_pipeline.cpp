// End-to-end walk through the library: sample a rough path, reconstruct its
// local time, average a distributional drift along it, and solve the
// perturbed ODE with one flow derivative.
#include <cstdio>

#include "pathreg/pathreg.hpp"

using namespace pathreg;

int main() {
  gauss::GaussianModel model;
  model.kind = gauss::FbmSpec{0.5};
  const auto path = gauss::sample(model, 1 << 10, /*seed=*/7);

  core::FrequencyGrid fgrid(1, 64.0, 257);
  const auto spectrum = occupation::occupation_spectrum(path, 0.0, 1.0, fgrid);
  const auto lt = occupation::local_time(spectrum);
  std::printf("local time: mass %.6f, max %.4f\n", lt.integral(), lt.max_value());

  const auto drift = averaging::sine_drift(1.0, 1.0);
  yode::CombDriftField field(drift, path, /*jet_order=*/2);
  Eigen::VectorXd x0(1);
  x0 << 0.3;
  const auto jet = yode::solve_flow(field, x0, /*k=*/1, {});
  std::printf("solve: status %s, y(T) = %.6f, dy/dx(T) = %.6f\n",
              jet.status == yode::SolveStatus::Complete ? "complete" : "not complete",
              jet.levels[0](static_cast<Eigen::Index>(jet.grid.steps), 0),
              jet.levels[1](static_cast<Eigen::Index>(jet.grid.steps), 0));
  return 0;
}
