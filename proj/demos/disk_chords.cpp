// Traces one orbit in the unit disk and checks that every chord has length
// 2 cos(theta) and that the reflection angle is conserved.

#include <cmath>
#include <cstdio>

#include "billiards/billiards.hpp"

int main() {
  using namespace billiards;
  const Table disk = make_preset("disk");
  const double theta = 0.4;
  const PhasePoint z0{{1.0, 0.0}, {-std::cos(theta), std::sin(theta)}};
  double worst = 0.0;
  std::printf("bounce  length      2cos(theta)\n");
  trace_orbit(disk, ReflectionLaw::elastic(), z0, 1000, [&](const ChordRecord& c) {
    worst = std::fmax(worst, std::fabs(c.length - 2.0 * std::cos(theta)));
    return true;
  });
  const auto first = causality_map(disk, z0);
  std::printf("1       %.12f  %.12f\n", first->length, 2.0 * std::cos(theta));
  std::printf("max deviation over 1000 bounces: %.3e\n", worst);
  const MeanFreePath m = mean_free_path(disk, 200'000, 1, default_workers());
  std::printf("mean free path %.5f +- %.5f, formula pi/2 = %.5f\n", m.space.estimate.mean(),
              m.space.estimate.std_error(), m.prediction);
  return 0;
}
