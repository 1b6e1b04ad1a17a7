#pragma once

// Padded FFT engine backing all convolutions and physical-space evaluations.
//
// The padded grid has P >= 2*(2N+1) points per axis, so a product of two
// band-limited fields never wraps around: circular convolution on the grid
// equals exact linear convolution on every retained mode.  P is chosen
// 5-smooth for FFT speed.  Plans are created with FFTW_ESTIMATE only; the
// planner's timing-driven choices would otherwise make runs non-reproducible
// bit for bit.
//
// Two code paths:
//   * a general complex path, and
//   * a half-spectrum real path for fields with the conjugate symmetry of a
//     real physical signal (all model states in practice).  It halves the
//     transform cost and memory.
//
// Conventions: to_physical(f)(x) = h^dim * sum_m f(m) exp(+2*pi*i x.m / P),
// to_spectral is its exact inverse, so pointwise products of physical samples
// reproduce the lattice convolution h^dim * sum f(eta) g(xi-eta) exactly.

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "tns/field.hpp"
#include "tns/lattice.hpp"

namespace tns {

// Smallest 5-smooth (2^a 3^b 5^c) integer >= 2*(2N+1).
inline int padded_size(int N) {
  auto five_smooth = [](int n) {
    for (int p : {2, 3, 5})
      while (n % p == 0) n /= p;
    return n == 1;
  };
  int P = 2 * (2 * N + 1);
  while (!five_smooth(P)) ++P;
  return P;
}

namespace detail {
inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace detail

class GridTransform {
 public:
  explicit GridTransform(const FrequencyLattice& lat)
      : lat_(lat), P_(padded_size(lat.N)), half_(P_ / 2 + 1) {
    grid_points_ = 1;
    for (int a = 0; a < lat_.dim; ++a) grid_points_ *= static_cast<std::size_t>(P_);
    half_points_ = grid_points_ / static_cast<std::size_t>(P_) * static_cast<std::size_t>(half_);
  }

  GridTransform(const GridTransform&) = delete;
  GridTransform& operator=(const GridTransform&) = delete;

  ~GridTransform() {
    std::lock_guard<std::mutex> lock(detail::planner_mutex());
    if (plan_fwd_) fftw_destroy_plan(plan_fwd_);
    if (plan_bwd_) fftw_destroy_plan(plan_bwd_);
    if (plan_r2c_) fftw_destroy_plan(plan_r2c_);
    if (plan_c2r_) fftw_destroy_plan(plan_c2r_);
    for (void* p : owned_) fftw_free(p);
  }

  const FrequencyLattice& lattice() const { return lat_; }
  int padded() const { return P_; }

  // ---- public transforms (complex path) -----------------------------------

  std::vector<cplx> to_physical(const SpectralScalarField& f) {
    check_lattice(f.lattice, "to_physical");
    ensure_complex();
    embed_complex(f, in_);
    fftw_execute(plan_bwd_);  // in_ -> out_, exp(+i...)
    const double scale = std::pow(lat_.h, lat_.dim);
    std::vector<cplx> phys(grid_points_);
    for (std::size_t i = 0; i < grid_points_; ++i)
      phys[i] = cplx{out_[i][0] * scale, out_[i][1] * scale};
    return phys;
  }

  SpectralScalarField to_spectral(const std::vector<cplx>& phys, double time = 0.0) {
    if (phys.size() != grid_points_)
      throw std::invalid_argument("to_spectral: physical grid size mismatch");
    ensure_complex();
    for (std::size_t i = 0; i < grid_points_; ++i) {
      in_[i][0] = phys[i].real();
      in_[i][1] = phys[i].imag();
    }
    fftw_execute(plan_fwd_);  // in_ -> out_, exp(-i...)
    const double scale =
        1.0 / (std::pow(lat_.h, lat_.dim) * static_cast<double>(grid_points_));
    SpectralScalarField f(lat_, time);
    extract_complex(out_, scale, f);
    return f;
  }

  // ---- convolution ----------------------------------------------------------

  SpectralScalarField convolve(const SpectralScalarField& f, const SpectralScalarField& g) {
    check_lattice(f.lattice, "convolve");
    check_lattice(g.lattice, "convolve");
    if (&f == &g || f.a == g.a) return self_convolve(f);
    if (is_conjugate_symmetric(f) && is_conjugate_symmetric(g)) return convolve_real(f, g);
    return convolve_complex(f, g);
  }

  SpectralScalarField self_convolve(const SpectralScalarField& f) {
    check_lattice(f.lattice, "self_convolve");
    if (is_conjugate_symmetric(f)) {
      ensure_real();
      embed_half(f, halfbuf_);
      fftw_execute(plan_c2r_);  // halfbuf_ -> realA_
      for (std::size_t i = 0; i < grid_points_; ++i) realA_[i] *= realA_[i];
      fftw_execute(plan_r2c_);  // realA_ -> halfbuf_
      return extract_half(f.time);
    }
    ensure_complex();
    embed_complex(f, in_);
    fftw_execute(plan_bwd_);
    for (std::size_t i = 0; i < grid_points_; ++i) {
      const double re = out_[i][0], im = out_[i][1];
      in_[i][0] = re * re - im * im;
      in_[i][1] = 2.0 * re * im;
    }
    fftw_execute(plan_fwd_);
    SpectralScalarField r(lat_, f.time);
    extract_complex(out_, conv_scale(), r);
    return r;
  }

  // ---- batched product path -------------------------------------------------
  //
  // real_samples + product_spectrum split convolve_real into its two halves so
  // callers forming many pairwise products (e.g. a quadratic right-hand side
  // with several component pairs) can transform each factor once.  The samples
  // are raw inverse-DFT sums without the h^dim factor; product_spectrum applies
  // the combined normalization, making its result bitwise identical to
  // convolve() on the same pair.

  void real_samples(const SpectralScalarField& f, std::vector<double>& out) {
    check_lattice(f.lattice, "real_samples");
    if (!is_conjugate_symmetric(f))
      throw std::invalid_argument("real_samples: field is not conjugate-symmetric");
    ensure_real();
    embed_half(f, halfbuf_);
    fftw_execute(plan_c2r_);  // halfbuf_ -> realA_
    out.assign(realA_, realA_ + grid_points_);
  }

  // Lattice convolution of the two fields whose real_samples are given.
  SpectralScalarField product_spectrum(const std::vector<double>& a,
                                       const std::vector<double>& b, double time = 0.0) {
    if (a.size() != grid_points_ || b.size() != grid_points_)
      throw std::invalid_argument("product_spectrum: grid size mismatch");
    ensure_real();
    for (std::size_t i = 0; i < grid_points_; ++i) realA_[i] = a[i] * b[i];
    fftw_execute(plan_r2c_);
    return extract_half(time);
  }

  // ---- physical sup norms ----------------------------------------------------

  // max over the padded grid of |f(x)|
  double physical_sup(const SpectralScalarField& f) {
    check_lattice(f.lattice, "physical_sup");
    if (is_conjugate_symmetric(f)) {
      ensure_real();
      embed_half(f, halfbuf_);
      fftw_execute(plan_c2r_);
      const double scale = std::pow(lat_.h, lat_.dim);
      double worst = 0.0;
      for (std::size_t i = 0; i < grid_points_; ++i) worst = std::max(worst, std::abs(realA_[i]));
      return worst * scale;
    }
    ensure_complex();
    embed_complex(f, in_);
    fftw_execute(plan_bwd_);
    const double scale = std::pow(lat_.h, lat_.dim);
    double worst = 0.0;
    for (std::size_t i = 0; i < grid_points_; ++i)
      worst = std::max(worst, std::hypot(out_[i][0], out_[i][1]));
    return worst * scale;
  }

  // max over the grid of the euclidean magnitude across components
  double physical_sup(const SpectralVectorField& u) {
    check_lattice(u.lattice, "physical_sup");
    std::vector<double> sq(grid_points_, 0.0);
    for (int j = 0; j < u.dim(); ++j) {
      SpectralScalarField f = component_view(u, j);
      if (is_conjugate_symmetric(f)) {
        ensure_real();
        embed_half(f, halfbuf_);
        fftw_execute(plan_c2r_);
        for (std::size_t i = 0; i < grid_points_; ++i) sq[i] += realA_[i] * realA_[i];
      } else {
        ensure_complex();
        embed_complex(f, in_);
        fftw_execute(plan_bwd_);
        for (std::size_t i = 0; i < grid_points_; ++i)
          sq[i] += out_[i][0] * out_[i][0] + out_[i][1] * out_[i][1];
      }
    }
    const double scale = std::pow(lat_.h, lat_.dim);
    double worst = 0.0;
    for (double v : sq) worst = std::max(worst, v);
    return std::sqrt(worst) * scale;
  }

 private:
  void check_lattice(const FrequencyLattice& l, const char* who) const {
    if (l != lat_) throw std::invalid_argument(std::string(who) + ": lattice mismatch");
  }

  double conv_scale() const {
    return std::pow(lat_.h, lat_.dim) / static_cast<double>(grid_points_);
  }

  // ---- buffer / plan management ---------------------------------------------

  void ensure_complex() {
    if (in_) return;
    std::lock_guard<std::mutex> lock(detail::planner_mutex());
    in_ = alloc_complex(grid_points_);
    out_ = alloc_complex(grid_points_);
    if (lat_.dim == 2) {
      plan_fwd_ = fftw_plan_dft_2d(P_, P_, in_, out_, FFTW_FORWARD, FFTW_ESTIMATE);
      plan_bwd_ = fftw_plan_dft_2d(P_, P_, in_, out_, FFTW_BACKWARD, FFTW_ESTIMATE);
    } else {
      plan_fwd_ = fftw_plan_dft_3d(P_, P_, P_, in_, out_, FFTW_FORWARD, FFTW_ESTIMATE);
      plan_bwd_ = fftw_plan_dft_3d(P_, P_, P_, in_, out_, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
  }

  void ensure_real() {
    if (realA_) return;
    std::lock_guard<std::mutex> lock(detail::planner_mutex());
    realA_ = static_cast<double*>(fftw_malloc(sizeof(double) * grid_points_));
    realB_ = static_cast<double*>(fftw_malloc(sizeof(double) * grid_points_));
    owned_.push_back(realA_);
    owned_.push_back(realB_);
    halfbuf_ = alloc_complex(half_points_);
    if (lat_.dim == 2) {
      plan_c2r_ = fftw_plan_dft_c2r_2d(P_, P_, halfbuf_, realA_, FFTW_ESTIMATE);
      plan_r2c_ = fftw_plan_dft_r2c_2d(P_, P_, realA_, halfbuf_, FFTW_ESTIMATE);
    } else {
      plan_c2r_ = fftw_plan_dft_c2r_3d(P_, P_, P_, halfbuf_, realA_, FFTW_ESTIMATE);
      plan_r2c_ = fftw_plan_dft_r2c_3d(P_, P_, P_, realA_, halfbuf_, FFTW_ESTIMATE);
    }
  }

  fftw_complex* alloc_complex(std::size_t n) {
    auto* p = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
    owned_.push_back(p);
    return p;
  }

  int wrap(int m) const {
    int g = m % P_;
    return g < 0 ? g + P_ : g;
  }

  // ---- complex-path embed / extract -----------------------------------------

  void embed_complex(const SpectralScalarField& f, fftw_complex* buf) {
    std::fill_n(reinterpret_cast<double*>(buf), 2 * grid_points_, 0.0);
    const int N = lat_.N;
    if (lat_.dim == 2) {
      for (int m0 = -N; m0 <= N; ++m0) {
        const std::size_t row = static_cast<std::size_t>(wrap(m0)) * P_;
        const std::size_t src = static_cast<std::size_t>(m0 + N) * lat_.side();
        for (int m1 = -N; m1 <= N; ++m1) {
          const cplx z = f.a[src + (m1 + N)];
          const std::size_t gi = row + wrap(m1);
          buf[gi][0] = z.real();
          buf[gi][1] = z.imag();
        }
      }
    } else {
      const std::size_t side = lat_.side();
      for (int m0 = -N; m0 <= N; ++m0)
        for (int m1 = -N; m1 <= N; ++m1) {
          const std::size_t plane =
              (static_cast<std::size_t>(wrap(m0)) * P_ + wrap(m1)) * P_;
          const std::size_t src = (static_cast<std::size_t>(m0 + N) * side + (m1 + N)) * side;
          for (int m2 = -N; m2 <= N; ++m2) {
            const cplx z = f.a[src + (m2 + N)];
            const std::size_t gi = plane + wrap(m2);
            buf[gi][0] = z.real();
            buf[gi][1] = z.imag();
          }
        }
    }
  }

  void extract_complex(const fftw_complex* buf, double scale, SpectralScalarField& f) const {
    const int N = lat_.N;
    if (lat_.dim == 2) {
      for (int m0 = -N; m0 <= N; ++m0) {
        const std::size_t row = static_cast<std::size_t>(wrap(m0)) * P_;
        const std::size_t dst = static_cast<std::size_t>(m0 + N) * lat_.side();
        for (int m1 = -N; m1 <= N; ++m1) {
          const std::size_t gi = row + wrap(m1);
          f.a[dst + (m1 + N)] = cplx{buf[gi][0] * scale, buf[gi][1] * scale};
        }
      }
    } else {
      const std::size_t side = lat_.side();
      for (int m0 = -N; m0 <= N; ++m0)
        for (int m1 = -N; m1 <= N; ++m1) {
          const std::size_t plane =
              (static_cast<std::size_t>(wrap(m0)) * P_ + wrap(m1)) * P_;
          const std::size_t dst = (static_cast<std::size_t>(m0 + N) * side + (m1 + N)) * side;
          for (int m2 = -N; m2 <= N; ++m2) {
            const std::size_t gi = plane + wrap(m2);
            f.a[dst + (m2 + N)] = cplx{buf[gi][0] * scale, buf[gi][1] * scale};
          }
        }
    }
  }

  // ---- half-spectrum embed / extract ----------------------------------------

  // Store the last-axis-nonnegative half of f.  Indices satisfy
  // 0 <= m_last <= N < P/2, so no wrapping happens on the halved axis.
  void embed_half(const SpectralScalarField& f, fftw_complex* buf) {
    std::fill_n(reinterpret_cast<double*>(buf), 2 * half_points_, 0.0);
    const int N = lat_.N;
    const std::size_t side = lat_.side();
    if (lat_.dim == 2) {
      for (int m0 = -N; m0 <= N; ++m0) {
        const std::size_t row = static_cast<std::size_t>(wrap(m0)) * half_;
        const std::size_t src = static_cast<std::size_t>(m0 + N) * side;
        for (int m1 = 0; m1 <= N; ++m1) {
          const cplx z = f.a[src + (m1 + N)];
          buf[row + m1][0] = z.real();
          buf[row + m1][1] = z.imag();
        }
      }
    } else {
      for (int m0 = -N; m0 <= N; ++m0)
        for (int m1 = -N; m1 <= N; ++m1) {
          const std::size_t plane =
              (static_cast<std::size_t>(wrap(m0)) * P_ + wrap(m1)) * half_;
          const std::size_t src = (static_cast<std::size_t>(m0 + N) * side + (m1 + N)) * side;
          for (int m2 = 0; m2 <= N; ++m2) {
            const cplx z = f.a[src + (m2 + N)];
            buf[plane + m2][0] = z.real();
            buf[plane + m2][1] = z.imag();
          }
        }
    }
  }

  // Read lattice modes back from the half spectrum; negative last-axis modes
  // come from conjugation, and the m_last = 0 plane is re-symmetrized exactly
  // so the conjugate-symmetry invariant survives rounding.
  SpectralScalarField extract_half(double time) {
    SpectralScalarField f(lat_, time);
    const int N = lat_.N;
    const double scale = conv_scale();
    const std::size_t side = lat_.side();
    if (lat_.dim == 2) {
      for (int m0 = -N; m0 <= N; ++m0) {
        const std::size_t row = static_cast<std::size_t>(wrap(m0)) * half_;
        const std::size_t dst = static_cast<std::size_t>(m0 + N) * side;
        for (int m1 = 0; m1 <= N; ++m1)
          f.a[dst + (m1 + N)] =
              cplx{halfbuf_[row + m1][0] * scale, halfbuf_[row + m1][1] * scale};
      }
      for (int m0 = -N; m0 <= N; ++m0)
        for (int m1 = -N; m1 < 0; ++m1)
          f.a[lat_.flatten({m0, m1, 0})] = std::conj(f.a[lat_.flatten({-m0, -m1, 0})]);
    } else {
      for (int m0 = -N; m0 <= N; ++m0)
        for (int m1 = -N; m1 <= N; ++m1) {
          const std::size_t plane =
              (static_cast<std::size_t>(wrap(m0)) * P_ + wrap(m1)) * half_;
          const std::size_t dst = (static_cast<std::size_t>(m0 + N) * side + (m1 + N)) * side;
          for (int m2 = 0; m2 <= N; ++m2)
            f.a[dst + (m2 + N)] =
                cplx{halfbuf_[plane + m2][0] * scale, halfbuf_[plane + m2][1] * scale};
        }
      for (int m0 = -N; m0 <= N; ++m0)
        for (int m1 = -N; m1 <= N; ++m1)
          for (int m2 = -N; m2 < 0; ++m2)
            f.a[lat_.flatten({m0, m1, m2})] =
                std::conj(f.a[lat_.flatten({-m0, -m1, -m2})]);
    }
    // exact symmetrization of the m_last = 0 plane
    if (lat_.dim == 2) {
      for (int m0 = 1; m0 <= N; ++m0)
        f.a[lat_.flatten({-m0, 0, 0})] = std::conj(f.a[lat_.flatten({m0, 0, 0})]);
      f.a[lat_.flatten({0, 0, 0})] = cplx{f.a[lat_.flatten({0, 0, 0})].real(), 0.0};
    } else {
      for (int m0 = -N; m0 <= N; ++m0)
        for (int m1 = -N; m1 <= N; ++m1) {
          if (m0 < 0 || (m0 == 0 && m1 < 0)) {
            f.a[lat_.flatten({m0, m1, 0})] = std::conj(f.a[lat_.flatten({-m0, -m1, 0})]);
          }
        }
      f.a[lat_.flatten({0, 0, 0})] = cplx{f.a[lat_.flatten({0, 0, 0})].real(), 0.0};
    }
    return f;
  }

  SpectralScalarField convolve_real(const SpectralScalarField& f, const SpectralScalarField& g) {
    ensure_real();
    embed_half(f, halfbuf_);
    // same plan, different output buffer (identical size and alignment)
    fftw_execute_dft_c2r(plan_c2r_, halfbuf_, realB_);
    embed_half(g, halfbuf_);
    fftw_execute(plan_c2r_);  // -> realA_
    for (std::size_t i = 0; i < grid_points_; ++i) realA_[i] *= realB_[i];
    fftw_execute(plan_r2c_);
    return extract_half(std::max(f.time, g.time));
  }

  SpectralScalarField convolve_complex(const SpectralScalarField& f,
                                       const SpectralScalarField& g) {
    ensure_complex();
    std::vector<cplx> phys_f(grid_points_);
    embed_complex(f, in_);
    fftw_execute(plan_bwd_);
    for (std::size_t i = 0; i < grid_points_; ++i) phys_f[i] = cplx{out_[i][0], out_[i][1]};
    embed_complex(g, in_);
    fftw_execute(plan_bwd_);
    for (std::size_t i = 0; i < grid_points_; ++i) {
      const cplx p = phys_f[i] * cplx{out_[i][0], out_[i][1]};
      in_[i][0] = p.real();
      in_[i][1] = p.imag();
    }
    fftw_execute(plan_fwd_);
    SpectralScalarField r(lat_, std::max(f.time, g.time));
    extract_complex(out_, conv_scale(), r);
    return r;
  }

  FrequencyLattice lat_;
  int P_ = 0;
  int half_ = 0;
  std::size_t grid_points_ = 0;
  std::size_t half_points_ = 0;

  fftw_complex* in_ = nullptr;
  fftw_complex* out_ = nullptr;
  double* realA_ = nullptr;
  double* realB_ = nullptr;
  fftw_complex* halfbuf_ = nullptr;
  fftw_plan plan_fwd_ = nullptr;
  fftw_plan plan_bwd_ = nullptr;
  fftw_plan plan_r2c_ = nullptr;
  fftw_plan plan_c2r_ = nullptr;
  std::vector<void*> owned_;
};

// Process-wide engine cache, one per lattice shape.  Simulations and norm
// evaluations share the cached engine; call release_transforms() to reclaim
// the grid buffers after large runs.
inline std::map<std::tuple<int, int, double>, std::unique_ptr<GridTransform>>&
transform_registry() {
  static std::map<std::tuple<int, int, double>, std::unique_ptr<GridTransform>> reg;
  return reg;
}

inline std::mutex& transform_registry_mutex() {
  static std::mutex m;
  return m;
}

inline GridTransform& transform_for(const FrequencyLattice& lat) {
  std::lock_guard<std::mutex> lock(transform_registry_mutex());
  auto& reg = transform_registry();
  auto key = std::make_tuple(lat.dim, lat.N, lat.h);
  auto it = reg.find(key);
  if (it == reg.end()) it = reg.emplace(key, std::make_unique<GridTransform>(lat)).first;
  return *it->second;
}

inline void release_transforms() {
  std::lock_guard<std::mutex> lock(transform_registry_mutex());
  transform_registry().clear();
}

}  // namespace tns
