// Recovers the volume of a table from chord lengths and the boundary volume.
// On the ellipse the chords are drawn from the invariant measure. A single
// ellipse orbit stays on one caustic and gives a wrong answer, while a single
// orbit of the ergodic Sinai table recovers the free area.

#include <cstdio>
#include <vector>

#include "billiards/billiards.hpp"

int main() {
  using namespace billiards;

  const Table ellipse = make_preset("ellipse");
  const double perimeter = boundary_volume(ellipse);
  const BoundarySampler sampler(ellipse);
  std::vector<double> lengths;
  for (std::uint64_t i = 0; i < 100'000; ++i) {
    CounterRng rng(5, streams::boundary_sampler, i);
    const auto c = causality_map(ellipse, from_boundary_coords(ellipse, sampler.draw_coords(rng)));
    if (c) lengths.push_back(c->length);
  }
  const std::vector<double> area = hear_volume(lengths, perimeter, 2);
  for (std::size_t k = 1000; k <= lengths.size(); k *= 10)
    std::printf("ellipse, %6zu sampled chords: area %.5f\n", k, area[k - 1]);
  std::printf("ellipse true area pi*1.2*0.8 = %.5f\n", M_PI * 1.2 * 0.8);

  CounterRng rng(5, streams::starters, 0);
  const PhasePoint start = from_boundary_coords(ellipse, sampler.draw_coords(rng));
  const TimeAverage orbit = time_average(ellipse, ReflectionLaw::elastic(), Observable::chord_length(), start, 100'000);
  std::printf("ellipse, one orbit of %llu bounces: area %.5f (integrable, not ergodic)\n",
              static_cast<unsigned long long>(orbit.bounces), hear_volume({orbit.mean}, perimeter, 2).back());

  const Table sinai = make_preset("torus-two-balls");
  const BoundarySampler sinai_sampler(sinai);
  CounterRng rng2(5, streams::starters, 0);
  const TimeAverage sinai_orbit = time_average(sinai, ReflectionLaw::elastic(), Observable::chord_length(),
                                               from_boundary_coords(sinai, sinai_sampler.draw_coords(rng2)), 200'000);
  const DomainVolumes v = domain_volumes(sinai);
  std::printf("sinai, one orbit of %llu bounces: area %.5f, true free area %.5f\n",
              static_cast<unsigned long long>(sinai_orbit.bounces),
              hear_volume({sinai_orbit.mean}, v.vol_dM, 2).back(), v.vol_M);
  return 0;
}
