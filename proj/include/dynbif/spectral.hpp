// Dirichlet Laplacian eigenbasis on intervals and rectangles, with the
// trapezoidal quadrature grid used for all nonlinear projections.
//
// Basis convention: eigenfunctions are orthonormal in H = L2, so the mass
// matrix is the identity and |u|^2 = sum a_j^2, ||u||^2 = sum mu_j a_j^2.
// (A V-orthonormal basis differs by the factor 1/sqrt(mu_j) per mode.)
#ifndef DYNBIF_SPECTRAL_HPP
#define DYNBIF_SPECTRAL_HPP

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "dynbif/errors.hpp"

namespace dynbif {

enum class DomainKind { Interval, Rectangle };

struct DomainSpec {
    DomainKind kind = DomainKind::Interval;
    double length_x = 0.0;
    double length_y = 0.0;  // unused for intervals

    static DomainSpec interval(double length) {
        if (!(length > 0.0)) throw InvalidArgument("interval length must be positive");
        return {DomainKind::Interval, length, 0.0};
    }
    static DomainSpec rectangle(double lx, double ly) {
        if (!(lx > 0.0) || !(ly > 0.0)) throw InvalidArgument("rectangle sides must be positive");
        return {DomainKind::Rectangle, lx, ly};
    }
};

// One retained eigenpair; jy == 0 marks a 1D mode.
struct Mode {
    double eigenvalue;
    int jx;
    int jy;
};

class SpectralDomain {
  public:
    // Retains the m lowest modes (2D ties broken by (jx, jy) lexicographic
    // order). p_max is the largest polynomial degree the quadrature must
    // de-alias; the per-axis grid has 2*(p_max+1)*max_index subintervals.
    static SpectralDomain build(const DomainSpec& spec, int m, int p_max = 5);

    const DomainSpec& spec() const { return spec_; }
    int mode_count() const { return static_cast<int>(modes_.size()); }
    const std::vector<Mode>& mode_list() const { return modes_; }
    const Eigen::VectorXd& eigenvalues() const { return mu_; }
    double eigenvalue(int j) const { return mu_[j]; }  // 0-based mode index
    double domain_measure() const;

    // k-th distinct eigenvalue (k >= 1) and its multiplicity within the
    // retained modes. Throws OutOfRange past the truncation.
    std::pair<double, int> distinct_eigenvalue(int k) const;
    int distinct_count() const;

    int grid_size() const { return static_cast<int>(weights_.size()); }
    const Eigen::VectorXd& quadrature_weights() const { return weights_; }

    // u = sum a_j phi_j on the quadrature grid
    Eigen::VectorXd synthesize(const Eigen::VectorXd& coeffs) const;
    // du/dx_axis on the grid (axis 0 or 1)
    Eigen::VectorXd synthesize_derivative(const Eigen::VectorXd& coeffs, int axis) const;
    // H inner products <w, phi_j> by quadrature
    Eigen::VectorXd project(const Eigen::VectorXd& samples) const;
    // quadrature of pointwise samples
    double integrate(const Eigen::VectorXd& samples) const;

    double h_norm2(const Eigen::VectorXd& coeffs) const;
    double v_norm2(const Eigen::VectorXd& coeffs) const;
    double v_norm(const Eigen::VectorXd& coeffs) const;

    // (sum_{j>m0} a_j^2, sum_{j>m0} mu_j a_j^2) for 0 <= m0 <= m
    std::pair<double, double> tail_norms(const Eigen::VectorXd& coeffs, int m0) const;

  private:
    SpectralDomain() = default;

    DomainSpec spec_;
    std::vector<Mode> modes_;
    Eigen::VectorXd mu_;
    Eigen::VectorXd weights_;
    Eigen::MatrixXd basis_;     // grid x m
    Eigen::MatrixXd basis_dx_;  // grid x m
    Eigen::MatrixXd basis_dy_;  // grid x m (rectangles only)
};

}  // namespace dynbif

#endif
