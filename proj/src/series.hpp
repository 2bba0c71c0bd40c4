#pragma once

#include <vector>

#include "rational.hpp"

namespace cspec {

// Truncated power series in one variable with exact rational coefficients.
// All operations truncate to the common order.
class RationalSeries {
public:
    explicit RationalSeries(int order) : coeffs_(order, Rational(0)) {}
    static RationalSeries one(int order);
    // 1 / (1 - c x) = sum_m (c x)^m.
    static RationalSeries geometric(const Rational& c, int order);
    // 1 - c x.
    static RationalSeries linear(const Rational& c, int order);

    int order() const { return static_cast<int>(coeffs_.size()); }
    const Rational& operator[](int i) const { return coeffs_[i]; }
    Rational& operator[](int i) { return coeffs_[i]; }

    RationalSeries operator*(const RationalSeries& rhs) const;

    // Evaluates the truncated polynomial at x.
    Rational evaluate(const Rational& x) const;

private:
    std::vector<Rational> coeffs_;
};

Rational falling_factorial(long n, int terms);        // n (n-1) ... (n-terms+1)
Rational step_product(long start, int terms, long step);  // start (start-step) ...

}  // namespace cspec
