// Compares time averages of the chord length along Sinai billiard orbits with
// the space average and with the volume formula.

#include <cstdio>

#include "billiards/billiards.hpp"

int main() {
  using namespace billiards;
  const Table t = make_preset("torus-two-balls");
  const int workers = default_workers();
  const MeanFreePath m = mean_free_path(t, 500'000, 1, workers);
  std::printf("space average %.5f +- %.5f, formula %.5f\n", m.space.estimate.mean(), m.space.estimate.std_error(),
              m.prediction);
  const AverageReport r =
      birkhoff_report(t, ReflectionLaw::elastic(), Observable::chord_length(), 5, 50'000, 200'000, 2, workers);
  for (std::size_t i = 0; i < r.time_avg.size(); ++i)
    std::printf("orbit %zu: time average %.5f (relative gap %.3f%%)\n", i, r.time_avg[i].mean,
                100.0 * r.agreement[i]);
  return 0;
}
