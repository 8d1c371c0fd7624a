#pragma once

// Discrete Fourier transforms on periodic grids (FFTW backend).
//
// Convention: the forward transform is unnormalized,
//   F[k] = sum_x f[x] exp(-i k.x),
// and the inverse carries the 1/prod(N_i) factor, so inverse(forward(f)) == f.
// Under this scaling Parseval reads
//   sum |f|^2 * prod(h_i) == sum |F|^2 * prod(h_i) / prod(N_i).

#include <fftw3.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <utility>
#include <vector>

#include "field.hpp"

namespace xfelnls {

namespace detail {

// The FFTW planner is not reentrant; plan execution on distinct arrays is.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(const GridSpec& grid, int sign) {
    std::vector<int> dims;
    for (int i = 0; i < grid.dim(); ++i) dims.push_back(static_cast<int>(grid.points(i)));
    auto key = std::make_pair(dims, sign);
    std::lock_guard lock(mutex_);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second.get();
    auto* buf = fftw_alloc_complex(grid.size());
    fftw_plan p = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), buf, buf, sign,
                                FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    if (p == nullptr) throw UnsupportedConfiguration("FFTW could not create a plan");
    auto [ins, ok] = plans_.emplace(std::move(key), PlanPtr(p));
    return ins->second.get();
  }

 private:
  struct PlanDeleter {
    void operator()(fftw_plan p) const noexcept { fftw_destroy_plan(p); }
  };
  using PlanPtr = std::unique_ptr<std::remove_pointer_t<fftw_plan>, PlanDeleter>;

  std::mutex mutex_;
  std::map<std::pair<std::vector<int>, int>, PlanPtr> plans_;
};

inline fftw_complex* as_fftw(Complex* p) noexcept { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace detail

/// In-place unnormalized forward DFT of raw samples on `grid`.
inline void fft_forward(const GridSpec& grid, std::span<Complex> data) {
  auto* p = detail::as_fftw(data.data());
  fftw_execute_dft(detail::PlanCache::instance().get(grid, FFTW_FORWARD), p, p);
}

/// In-place normalized inverse DFT of raw coefficients on `grid`.
inline void fft_inverse(const GridSpec& grid, std::span<Complex> data) {
  auto* p = detail::as_fftw(data.data());
  fftw_execute_dft(detail::PlanCache::instance().get(grid, FFTW_BACKWARD), p, p);
  const double scale = 1.0 / static_cast<double>(grid.size());
  for (auto& v : data) v *= scale;
}

inline Field forward_transform(Field f) {
  f.require_space(Space::Physical, "forward_transform");
  fft_forward(f.grid(), f.values());
  f.set_space(Space::Fourier);
  return f;
}

inline Field inverse_transform(Field f) {
  f.require_space(Space::Fourier, "inverse_transform");
  fft_inverse(f.grid(), f.values());
  f.set_space(Space::Physical);
  return f;
}

/// Multiplies each Fourier coefficient by `m(k)`, where k is the wavevector.
template <class Multiplier>
Field apply_multiplier(Field f, Multiplier&& m) {
  f.require_space(Space::Fourier, "apply_multiplier");
  const WaveTable table(f.grid());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] *= Complex(m(table.wavevector(i)));
  return f;
}

/// Precomputed-table variant used in inner loops.
inline void apply_multiplier(std::span<Complex> coeffs, std::span<const Complex> m) {
  for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] *= m[i];
}

/// Discrete L2(box) norm, sqrt(prod h_i * sum |f|^2).
inline double l2_norm(const Field& f) {
  f.require_space(Space::Physical, "l2_norm");
  double s = 0.0;
  for (const auto& v : f.values()) s += std::norm(v);
  return std::sqrt(f.grid().cell_volume() * s);
}

inline double mass(const Field& f) {
  const double n = l2_norm(f);
  return n * n;
}

}  // namespace xfelnls
