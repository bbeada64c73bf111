#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <vector>

#include "cpl/forcing.hpp"
#include "cpl/solver.hpp"
#include "cpl/spectral.hpp"

namespace cpl {

/// m tangent vectors held as spectra, orthonormal in the discrete L2 product.
class TangentFrame {
 public:
  /// Random frame built from modes |k| <= n/4 with a fixed seed.
  TangentFrame(CircleGrid grid, int m, std::uint64_t seed = 1);

  int size() const noexcept { return static_cast<int>(v_.size()); }
  std::vector<Spectrum>& vectors() noexcept { return v_; }
  const std::vector<Spectrum>& vectors() const noexcept { return v_; }
  std::vector<Field> fields() const;

  /// Modified Gram-Schmidt. Returns the diagonal of R; throws Degenerate when
  /// a vector falls below 1e-300.
  std::vector<double> orthonormalize();
  /// max |<v_i, v_j> - delta_ij|
  double orthogonality_error() const;

 private:
  CircleGrid grid_;
  std::vector<Spectrum> v_;
};

/// Discrete L2 product of two spectra (equal to inner_product on the fields).
double spectral_inner(const Spectrum& a, const Spectrum& b);

struct SpectrumOptions {
  int m = 5;
  int reorth_every = 10;
  /// averaging horizon in time units
  double window = 2000.0;
  double center_band = 0.05;
  std::uint64_t seed = 1;
};

struct SpectrumDims {
  int dim_u = 0;
  int dim_c = 0;
  int N_u = 0;
};

struct SpectrumEstimate {
  std::vector<double> exponents;  // descending
  std::vector<double> std_error;  // |full - last half|
  double window = 0.0;
  double center_band = 0.0;
  SpectrumDims dims;
};

/// QR-method exponents along a stored stride-1 base trajectory.
SpectrumEstimate lyapunov_exponents(const Trajectory& base, const SpectrumOptions& opts = {});

/// Same, integrating the base alongside the frame so no trajectory is stored.
/// The window starts after `transient`.
SpectrumEstimate lyapunov_exponents(const Field& u0, const HullPoint& g, const Nonlinearity& nl, double dt,
                                    const SpectrumOptions& opts = {}, double transient = 0.0,
                                    SolverOptions solver = {});

/// dim_u: exponents > eps_c; dim_c: |exponent| <= eps_c; N_u: dim_u rounded up to even.
SpectrumDims classify_spectrum(const std::vector<double>& exponents, double eps_c);

struct ZeroBoundsReport {
  int n1 = 0, n2 = 0;
  int N1 = 0, N2 = 0;
  int trials = 0;
  int min_z = 0, max_z = 0;
  int violations = 0;
  int ambiguous = 0;
  std::map<int, int> histogram;
  bool passed = false;
};

/// Random combinations of the Fourier modes n1..n2 must have N1 <= z <= N2,
/// where N1 = dim V^{0,n1-1} rounded up to even (0 when n1 = 0) and
/// N2 = dim V^{0,n2} rounded down to even.
ZeroBoundsReport mode_zero_bounds_check(int n1, int n2, int trials, std::uint64_t seed = 1);

/// Columns rank,exponent,stderr.
void write_csv(std::ostream& os, const SpectrumEstimate& est);
/// Columns dim_u,dim_c,N_u.
void write_dims_csv(std::ostream& os, const SpectrumEstimate& est);

}  // namespace cpl
