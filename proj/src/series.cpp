#include "series.hpp"

#include "errors.hpp"

namespace cspec {

RationalSeries RationalSeries::one(int order) {
    RationalSeries s(order);
    if (order > 0) s[0] = 1;
    return s;
}

RationalSeries RationalSeries::geometric(const Rational& c, int order) {
    RationalSeries s(order);
    Rational power(1);
    for (int i = 0; i < order; ++i) {
        s[i] = power;
        power *= c;
    }
    return s;
}

RationalSeries RationalSeries::linear(const Rational& c, int order) {
    RationalSeries s = one(order);
    if (order > 1) s[1] = -c;
    return s;
}

RationalSeries RationalSeries::operator*(const RationalSeries& rhs) const {
    require(order() == rhs.order(), "RationalSeries: order mismatch");
    RationalSeries out(order());
    for (int i = 0; i < order(); ++i) {
        if (coeffs_[i] == 0) continue;
        for (int j = 0; i + j < order(); ++j) out[i + j] += coeffs_[i] * rhs[j];
    }
    return out;
}

Rational RationalSeries::evaluate(const Rational& x) const {
    Rational acc(0);
    for (int i = order() - 1; i >= 0; --i) acc = acc * x + coeffs_[i];
    return acc;
}

Rational falling_factorial(long n, int terms) {
    Rational out(1);
    for (int j = 0; j < terms; ++j) out *= Rational(n - j);
    return out;
}

Rational step_product(long start, int terms, long step) {
    Rational out(1);
    for (int j = 0; j < terms; ++j) out *= Rational(start - static_cast<long>(j) * step);
    return out;
}

}  // namespace cspec
