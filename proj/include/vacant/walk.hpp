#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "error.hpp"
#include "random.hpp"
#include "torus.hpp"

namespace vacant {

inline constexpr int max_walks = 16;

// Direction index 2j is +e_{j+1}, 2j+1 is -e_{j+1}.
inline TorusPoint apply_direction(TorusPoint p, int dir, const TorusGeometry& g) {
  const int j = dir >> 1;
  p[j] = (dir & 1) ? (p[j] == 0 ? g.n - 1 : p[j] - 1) : (p[j] == g.n - 1 ? 0 : p[j] + 1);
  return p;
}

inline TorusPoint lazy_step(const TorusPoint& p, const TorusGeometry& g, RandomSource& rng) {
  if (rng.next_bit()) return p;
  return apply_direction(p, static_cast<int>(rng.below(2 * static_cast<std::uint64_t>(g.d))), g);
}

inline TorusPoint sample_uniform_point(const TorusGeometry& g, RandomSource& rng) {
  return point_at(rng.below(g.vertex_count()), g);
}

// Same kernel on row-major indices; consumes randomness exactly like lazy_step.
class IndexStepper {
 public:
  explicit IndexStepper(const TorusGeometry& g) : g_(g), stride_(strides(g)) {}

  std::uint64_t step(std::uint64_t idx, RandomSource& rng) const {
    if (rng.next_bit()) return idx;
    const auto dir = static_cast<int>(rng.below(2 * static_cast<std::uint64_t>(g_.d)));
    const std::uint64_t s = stride_[dir >> 1];
    const auto c = (idx / s) % static_cast<std::uint64_t>(g_.n);
    if (dir & 1) return c == 0 ? idx + (g_.n - 1) * s : idx - s;
    return c + 1 == static_cast<std::uint64_t>(g_.n) ? idx - (g_.n - 1) * s : idx + s;
  }

 private:
  TorusGeometry g_;
  std::vector<std::uint64_t> stride_;
};

struct ReplicateObservation {
  int ell = 0;
  std::uint64_t t = 0;
  std::uint64_t vacant = 0;
  // range[I] = number of vertices visited by exactly the walks in bitmask I.
  std::vector<std::uint64_t> range;
};

// Walk i draws its start and steps from rng.substream(i), so a longer horizon
// extends the same trajectories.
inline ReplicateObservation run_replicate(const TorusGeometry& g, int ell, std::uint64_t t,
                                          const RandomSource& rng,
                                          const VertexBudget& budget = {}) {
  require(ell >= 1 && ell <= max_walks, "walk count must be in [1, 16]");
  budget.check(g, "run_replicate");
  const std::uint64_t N = g.vertex_count();
  std::vector<std::uint16_t> marks(N, 0);
  const IndexStepper stepper(g);
  for (int i = 0; i < ell; ++i) {
    RandomSource walk = rng.substream(static_cast<std::uint64_t>(i));
    const auto bit = static_cast<std::uint16_t>(1u << i);
    std::uint64_t x = walk.below(N);
    marks[x] |= bit;
    for (std::uint64_t s = 0; s < t; ++s) {
      x = stepper.step(x, walk);
      marks[x] |= bit;
    }
  }
  ReplicateObservation obs;
  obs.ell = ell;
  obs.t = t;
  obs.range.assign(std::size_t{1} << ell, 0);
  for (std::uint16_t m : marks) ++obs.range[m];
  obs.vacant = obs.range[0];
  return obs;
}

// First t with X_t in targets, or nullopt when the walk is still outside at
// time cap.
inline std::optional<std::uint64_t> sample_hitting_time(const TorusGeometry& g,
                                                        const std::vector<TorusPoint>& targets,
                                                        std::uint64_t cap, RandomSource& rng) {
  require(!targets.empty(), "hitting targets must be nonempty");
  std::vector<std::uint64_t> idx;
  for (const auto& p : targets) {
    require(valid(p, g), "hitting target outside the torus");
    idx.push_back(index_of(p, g));
  }
  auto inside = [&](std::uint64_t x) {
    for (auto i : idx)
      if (i == x) return true;
    return false;
  };
  const IndexStepper stepper(g);
  std::uint64_t x = rng.below(g.vertex_count());
  for (std::uint64_t s = 0;; ++s) {
    if (inside(x)) return s;
    if (s == cap) return std::nullopt;
    x = stepper.step(x, rng);
  }
}

}  // namespace vacant
