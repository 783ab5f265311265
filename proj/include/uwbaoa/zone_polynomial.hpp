#pragma once

#include <span>
#include <vector>

#include "uwbaoa/channel.hpp"
#include "uwbaoa/propagation.hpp"
#include "uwbaoa/zone.hpp"

namespace uwbaoa {

inline constexpr int kMaxPolynomialDegree = 5;

/// Error angle as a polynomial of the raw estimate, valid on [lo, hi] degrees.
struct ZonePolynomial {
    Zone zone = Zone::z0;
    std::vector<double> coefficients;  // ascending powers of the raw estimate in degrees
    double lo = 0.0;
    double hi = 0.0;

    int degree() const { return static_cast<int>(coefficients.size()) - 1; }
    bool contains(double raw_deg) const { return raw_deg >= lo && raw_deg <= hi; }
    /// Throws std::out_of_range outside [lo, hi].
    double evaluate(double raw_deg) const;
    /// raw + evaluate(raw), wrapped.
    Angle correct(Angle raw) const;

    friend bool operator==(const ZonePolynomial&, const ZonePolynomial&) = default;
};

/// Least-squares fit of `error_deg` against `raw_deg`. Needs at least
/// degree + 1 distinct abscissae; throws DegenerateFitError otherwise or when
/// the design matrix is rank deficient.
ZonePolynomial fit_zone_polynomial(std::span<const double> raw_deg, std::span<const double> error_deg,
                                   int degree, Zone zone);

/// Fits the naive-estimate error of `records` (all expected to lie in `zone`).
ZonePolynomial fit_zone_polynomial(std::span<const MeasurementRecord> records, const AntennaGeometry& geom,
                                   int degree, Zone zone);

}  // namespace uwbaoa
