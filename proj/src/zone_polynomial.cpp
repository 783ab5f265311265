#include "uwbaoa/zone_polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "uwbaoa/errors.hpp"
#include "uwbaoa/features.hpp"

namespace uwbaoa {

double ZonePolynomial::evaluate(double raw_deg) const {
    if (!contains(raw_deg))
        throw std::out_of_range("raw estimate " + std::to_string(raw_deg) + " outside fitted interval [" +
                                std::to_string(lo) + ", " + std::to_string(hi) + "]");
    double y = 0.0;
    for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) y = y * raw_deg + *it;
    return y;
}

Angle ZonePolynomial::correct(Angle raw) const { return Angle(raw.degrees() + evaluate(raw.degrees())); }

ZonePolynomial fit_zone_polynomial(std::span<const double> raw_deg, std::span<const double> error_deg,
                                   int degree, Zone zone) {
    if (raw_deg.size() != error_deg.size()) throw std::invalid_argument("abscissa and ordinate lengths differ");
    if (degree < 0 || degree > kMaxPolynomialDegree)
        throw std::invalid_argument("polynomial degree must be in [0, 5]");
    for (std::size_t i = 0; i < raw_deg.size(); ++i)
        if (!std::isfinite(raw_deg[i]) || !std::isfinite(error_deg[i]))
            throw std::invalid_argument("non-finite fit sample");

    std::vector<double> distinct(raw_deg.begin(), raw_deg.end());
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < static_cast<std::size_t>(degree) + 1)
        throw DegenerateFitError("need " + std::to_string(degree + 1) + " distinct abscissae, got " +
                                 std::to_string(distinct.size()));

    ZonePolynomial p;
    p.zone = zone;
    p.lo = distinct.front();
    p.hi = distinct.back();

    // Fit in t = (x - c) / s for conditioning, then expand back to powers of x.
    const double c = (p.lo + p.hi) / 2.0;
    const double s = p.hi > p.lo ? (p.hi - p.lo) / 2.0 : 1.0;
    const auto n = static_cast<Eigen::Index>(raw_deg.size());
    const Eigen::Index m = degree + 1;
    Eigen::MatrixXd v(n, m);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double t = (raw_deg[static_cast<std::size_t>(i)] - c) / s;
        double pw = 1.0;
        for (Eigen::Index k = 0; k < m; ++k) {
            v(i, k) = pw;
            pw *= t;
        }
        y(i) = error_deg[static_cast<std::size_t>(i)];
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(v);
    qr.setThreshold(1e-12);
    if (qr.rank() < m) throw DegenerateFitError("rank-deficient polynomial design");
    const Eigen::VectorXd a = qr.solve(y);

    // sum_k a_k ((x - c)/s)^k expanded binomially.
    p.coefficients.assign(static_cast<std::size_t>(m), 0.0);
    for (Eigen::Index k = 0; k < m; ++k) {
        const double ak = a(k) / std::pow(s, static_cast<double>(k));
        double binom = 1.0;
        for (Eigen::Index j = 0; j <= k; ++j) {
            p.coefficients[static_cast<std::size_t>(j)] +=
                ak * binom * std::pow(-c, static_cast<double>(k - j));
            binom = binom * static_cast<double>(k - j) / static_cast<double>(j + 1);
        }
    }
    return p;
}

ZonePolynomial fit_zone_polynomial(std::span<const MeasurementRecord> records, const AntennaGeometry& geom,
                                   int degree, Zone zone) {
    std::vector<double> x;
    std::vector<double> y;
    x.reserve(records.size());
    y.reserve(records.size());
    for (const auto& r : records) {
        const ClampedAoa naive = aoa_from_pdoa_clamped(geom, r.pdoa);
        x.push_back(naive.aoa.degrees());
        y.push_back(angular_difference(r.true_aoa, naive.aoa));
    }
    return fit_zone_polynomial(x, y, degree, zone);
}

}  // namespace uwbaoa
