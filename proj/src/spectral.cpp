#include "dynbif/spectral.hpp"

#include <algorithm>
#include <cmath>

namespace dynbif {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// Composite trapezoidal nodes/weights on [0, L] with n subintervals. Exact
// for cosine series with frequencies below 2n, which covers every product of
// an even number of retained sine modes up to the dealiasing degree (odd
// products reduce to sine series and carry an O(h^4) error instead; their
// boundary derivatives vanish, so the h^2 Euler-Maclaurin term drops out).
void trapezoid_axis(double length, int n, std::vector<double>& nodes, std::vector<double>& w) {
    const double h = length / n;
    nodes.resize(n + 1);
    w.resize(n + 1);
    for (int i = 0; i <= n; ++i) {
        nodes[i] = i * h;
        w[i] = (i == 0 || i == n) ? 0.5 * h : h;
    }
}

}  // namespace

SpectralDomain SpectralDomain::build(const DomainSpec& spec, int m, int p_max) {
    if (m < 1) throw InvalidArgument("truncation dimension m must be >= 1");
    if (p_max < 1) throw InvalidArgument("p_max must be >= 1");
    if (!(spec.length_x > 0.0) || (spec.kind == DomainKind::Rectangle && !(spec.length_y > 0.0)))
        throw InvalidArgument("domain lengths must be positive");

    SpectralDomain d;
    d.spec_ = spec;

    if (spec.kind == DomainKind::Interval) {
        const double L = spec.length_x;
        const double base = kPi / L;
        for (int j = 1; j <= m; ++j) {
            const double omega = j * base;
            d.modes_.push_back({omega * omega, j, 0});
        }

        const int max_index = m;
        const int n = 2 * (p_max + 1) * max_index;
        std::vector<double> x, wx;
        trapezoid_axis(L, n, x, wx);

        const int g = n + 1;
        d.weights_.resize(g);
        d.basis_.resize(g, m);
        d.basis_dx_.resize(g, m);
        const double amp = std::sqrt(2.0 / L);
        for (int i = 0; i < g; ++i) {
            d.weights_[i] = wx[i];
            for (int j = 0; j < m; ++j) {
                const double omega = (j + 1) * base;
                d.basis_(i, j) = amp * std::sin(omega * x[i]);
                d.basis_dx_(i, j) = amp * omega * std::cos(omega * x[i]);
            }
        }
    } else {
        const double Lx = spec.length_x, Ly = spec.length_y;
        const double bx = kPi / Lx, by = kPi / Ly;

        // Candidate cap from the m x m block, then a complete enumeration of
        // every mode below the cap so no low eigenvalue can be missed.
        std::vector<Mode> cand;
        for (int j = 1; j <= m; ++j)
            for (int k = 1; k <= m; ++k)
                cand.push_back({(j * bx) * (j * bx) + (k * by) * (k * by), j, k});
        std::sort(cand.begin(), cand.end(), [](const Mode& a, const Mode& b) {
            if (a.eigenvalue != b.eigenvalue) return a.eigenvalue < b.eigenvalue;
            if (a.jx != b.jx) return a.jx < b.jx;
            return a.jy < b.jy;
        });
        const double cap = cand[m - 1].eigenvalue;
        const int jmax = static_cast<int>(std::floor(std::sqrt(cap) / bx)) + 1;
        const int kmax = static_cast<int>(std::floor(std::sqrt(cap) / by)) + 1;
        std::vector<Mode> all;
        for (int j = 1; j <= jmax; ++j)
            for (int k = 1; k <= kmax; ++k)
                all.push_back({(j * bx) * (j * bx) + (k * by) * (k * by), j, k});
        std::sort(all.begin(), all.end(), [](const Mode& a, const Mode& b) {
            if (a.eigenvalue != b.eigenvalue) return a.eigenvalue < b.eigenvalue;
            if (a.jx != b.jx) return a.jx < b.jx;
            return a.jy < b.jy;
        });
        d.modes_.assign(all.begin(), all.begin() + m);

        int max_jx = 0, max_jy = 0;
        for (const Mode& mo : d.modes_) {
            max_jx = std::max(max_jx, mo.jx);
            max_jy = std::max(max_jy, mo.jy);
        }
        const int nx = 2 * (p_max + 1) * max_jx;
        const int ny = 2 * (p_max + 1) * max_jy;
        std::vector<double> x, wx, y, wy;
        trapezoid_axis(Lx, nx, x, wx);
        trapezoid_axis(Ly, ny, y, wy);

        const int gx = nx + 1, gy = ny + 1, g = gx * gy;
        d.weights_.resize(g);
        d.basis_.resize(g, m);
        d.basis_dx_.resize(g, m);
        d.basis_dy_.resize(g, m);
        const double amp = std::sqrt(4.0 / (Lx * Ly));
        for (int iy = 0; iy < gy; ++iy) {
            for (int ix = 0; ix < gx; ++ix) {
                const int i = iy * gx + ix;  // x fastest
                d.weights_[i] = wx[ix] * wy[iy];
                for (int jm = 0; jm < m; ++jm) {
                    const Mode& mo = d.modes_[jm];
                    const double ox = mo.jx * bx, oy = mo.jy * by;
                    const double sx = std::sin(ox * x[ix]), cx = std::cos(ox * x[ix]);
                    const double sy = std::sin(oy * y[iy]), cy = std::cos(oy * y[iy]);
                    d.basis_(i, jm) = amp * sx * sy;
                    d.basis_dx_(i, jm) = amp * ox * cx * sy;
                    d.basis_dy_(i, jm) = amp * oy * sx * cy;
                }
            }
        }
    }

    d.mu_.resize(m);
    for (int j = 0; j < m; ++j) d.mu_[j] = d.modes_[j].eigenvalue;
    return d;
}

double SpectralDomain::domain_measure() const {
    return spec_.kind == DomainKind::Interval ? spec_.length_x : spec_.length_x * spec_.length_y;
}

std::pair<double, int> SpectralDomain::distinct_eigenvalue(int k) const {
    if (k < 1) throw OutOfRange("distinct eigenvalue index must be >= 1");
    // Consecutive equal values within a fp-tolerance belong to one cluster.
    int cluster = 0;
    int i = 0;
    const int m = mode_count();
    while (i < m) {
        int j = i;
        while (j + 1 < m && mu_[j + 1] <= mu_[i] * (1.0 + 1e-12) + 1e-12) ++j;
        ++cluster;
        if (cluster == k) return {mu_[i], j - i + 1};
        i = j + 1;
    }
    throw OutOfRange("distinct eigenvalue index beyond truncation");
}

int SpectralDomain::distinct_count() const {
    int cluster = 0;
    int i = 0;
    const int m = mode_count();
    while (i < m) {
        int j = i;
        while (j + 1 < m && mu_[j + 1] <= mu_[i] * (1.0 + 1e-12) + 1e-12) ++j;
        ++cluster;
        i = j + 1;
    }
    return cluster;
}

Eigen::VectorXd SpectralDomain::synthesize(const Eigen::VectorXd& coeffs) const {
    if (coeffs.size() != mode_count()) throw InvalidArgument("coefficient length mismatch");
    return basis_ * coeffs;
}

Eigen::VectorXd SpectralDomain::synthesize_derivative(const Eigen::VectorXd& coeffs, int axis) const {
    if (coeffs.size() != mode_count()) throw InvalidArgument("coefficient length mismatch");
    if (axis == 0) return basis_dx_ * coeffs;
    if (axis == 1 && spec_.kind == DomainKind::Rectangle) return basis_dy_ * coeffs;
    throw InvalidArgument("derivative axis out of range for this domain");
}

Eigen::VectorXd SpectralDomain::project(const Eigen::VectorXd& samples) const {
    if (samples.size() != grid_size()) throw InvalidArgument("grid sample length mismatch");
    return basis_.transpose() * (weights_.cwiseProduct(samples)).eval();
}

double SpectralDomain::integrate(const Eigen::VectorXd& samples) const {
    if (samples.size() != grid_size()) throw InvalidArgument("grid sample length mismatch");
    return weights_.dot(samples);
}

double SpectralDomain::h_norm2(const Eigen::VectorXd& coeffs) const {
    if (coeffs.size() != mode_count()) throw InvalidArgument("coefficient length mismatch");
    return coeffs.squaredNorm();
}

double SpectralDomain::v_norm2(const Eigen::VectorXd& coeffs) const {
    if (coeffs.size() != mode_count()) throw InvalidArgument("coefficient length mismatch");
    return coeffs.dot(mu_.cwiseProduct(coeffs));
}

double SpectralDomain::v_norm(const Eigen::VectorXd& coeffs) const { return std::sqrt(v_norm2(coeffs)); }

std::pair<double, double> SpectralDomain::tail_norms(const Eigen::VectorXd& coeffs, int m0) const {
    const int m = mode_count();
    if (coeffs.size() != m) throw InvalidArgument("coefficient length mismatch");
    if (m0 < 0 || m0 > m) throw InvalidArgument("tail cutoff m0 out of range");
    double h2 = 0.0, v2 = 0.0;
    for (int j = m0; j < m; ++j) {
        h2 += coeffs[j] * coeffs[j];
        v2 += mu_[j] * coeffs[j] * coeffs[j];
    }
    return {h2, v2};
}

}  // namespace dynbif
