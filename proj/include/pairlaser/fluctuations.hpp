#pragma once

#include <complex>
#include <vector>
#include <Eigen/Dense>

#include "pairlaser/model.hpp"
#include "pairlaser/semiclassical.hpp"

namespace pairlaser::fluctuations {

using Complex = std::complex<double>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;
using Matrix6c = Eigen::Matrix<Complex, 6, 6>;
using Vector6c = Eigen::Matrix<Complex, 6, 1>;

// Linearized dynamics of (da, db, dg, da^+, db^+, dg^+) around the
// semiclassical branch: d/dt v = M v + xi with <xi xi^T> = D delta(t-t').
//
// Above threshold M always carries one exact zero eigenvalue: the model is
// invariant under opposite phase rotations of modes a and b, and the
// lasing branch breaks that symmetry. All stationary spectra are defined
// with this symmetry (Goldstone) mode deflated; the remaining spectrum
// must be Hurwitz.
struct FluctuationModel {
    Matrix6d M = Matrix6d::Zero();
    Matrix6d D = Matrix6d::Zero();
    ModelParams params;
    semiclassical::SemiclassicalState ss;

    // eigenstructure (filled by build_fluctuation_model)
    Matrix6c V, Vinv;
    Vector6c lambda;
    int zero_mode = -1;       // eigen index of the symmetry mode, -1 if absent
    bool damped = false;      // Re(lambda) < 0 for every non-symmetry mode
    Eigen::Matrix<double, 6, 1> v0 = Eigen::Matrix<double, 6, 1>::Zero();  // right null
    Eigen::Matrix<double, 6, 1> u0 = Eigen::Matrix<double, 6, 1>::Zero();  // left null
    Matrix6d D_deflated = Matrix6d::Zero();

    double rate_scale() const;
};

FluctuationModel build_fluctuation_model(const ModelParams& p,
                                         const semiclassical::SemiclassicalState& ss);

// Fill the eigenstructure / deflation fields for an externally supplied
// (M, D) pair; build_fluctuation_model calls this internally.
void analyze(FluctuationModel& fm);

// C(w) = (-iw - M)^-1 D_defl (iw - M)^-T, the symmetry mode removed.
// Regular at w = 0. Convention: <v_i(w) v_j(w')> = C_ij(w) delta(w+w').
Matrix6c correlation_matrix(const FluctuationModel& fm, double omega);

// Stationary covariance from (1/2pi) Int C(w) dw by adaptive panel
// quadrature (solves at each node; independent of the algebraic route).
Matrix6d covariance_by_quadrature(const FluctuationModel& fm);

// Stationary covariance solving M S + S M^T + D_defl = 0 on the damped
// subspace (Kronecker least squares, symmetry component removed).
Matrix6d covariance_by_lyapunov(const FluctuationModel& fm);

struct PopulationCorrection {
    double mode_a = 0, mode_b = 0, mode_c = 0;  // <dx^+ dx> per mode
    double total_a = 0, total_b = 0, total_c = 0;  // x0^2 + correction
};
PopulationCorrection population_correction(const FluctuationModel& fm);

struct QuadratureVariance {
    double xx_a = 0, xx_b = 0, xx_c = 0;  // <dx_m^2>
    double cross_ab = 0;                  // <dx_a dx_b>
};
QuadratureVariance quadrature_variance(const FluctuationModel& fm);

struct NumberStatistics {
    // 1 + <dx^2>/x0^2, the leading-order expansion with <I> ~= x0^2
    double g2_a = 0, g2_b = 0;
    double g_ab = 0;  // 1 + <dx_a dx_b>/(alpha0 beta0)
    // 1 + <dx^2>, the unit-intensity normalization used by the
    // fixed-intensity kappa scans (and by the paper's quoted V_a anchors)
    double g2_unit_a = 0, g2_unit_b = 0, g_ab_unit = 0;
    double validity = 0;  // <da^+da>^2 / (a0^2 <dx_a^2>), small when linearization holds
    bool validity_flag = false;
};
NumberStatistics number_statistics(const FluctuationModel& fm);

// Output-field quadrature spectrum V_x(w) = 1 + 2 kappa_x Q_xx(w).
enum class LaserMode { A, B };
std::vector<double> output_spectrum(const FluctuationModel& fm, LaserMode mode,
                                    const std::vector<double>& omega);

struct IntensityDifferenceSpectrum {
    std::vector<double> omega;
    std::vector<double> S;
    std::vector<double> S_over_shot;
    double shot = 0;
};
IntensityDifferenceSpectrum intensity_difference_spectrum(const FluctuationModel& fm,
                                                          const std::vector<double>& omega);

// Symmetric grid, dense near the slowest damped pole, log-spaced outward.
std::vector<double> default_omega_grid(const FluctuationModel& fm, double omega_max,
                                       int points);

}  // namespace pairlaser::fluctuations
