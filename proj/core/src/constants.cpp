#include "nsverify/constants.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace nsverify {

void ConstantsTable::refresh_derived() {
    const double pi = std::numbers::pi;
    c_P = std::sqrt(4.0 * pi * pi + 1.0) / (2.0 * pi);
    c_tilde = c_ell * std::max({c_i1, c_i2, k_edges * c_i3});
}

void ConstantsTable::validate() const {
    const double entries[] = {c_e1, c_e2, c_Pi1, c_Pi2,  c_P,  c_ell,
                              c_i1, c_i2, c_i3,  c_tilde, c_H1};
    for (double v : entries)
        if (!(v > 0.0))
            throw std::invalid_argument(
                "ConstantsTable: all entries must be strictly positive");
    if (k_edges < 1)
        throw std::invalid_argument("ConstantsTable: k_edges must be >= 1");
}

std::string ConstantsTable::to_json() const {
    std::ostringstream os;
    os.precision(17);
    os << "{\"c_e1\":" << c_e1 << ",\"c_e2\":" << c_e2 << ",\"c_Pi1\":" << c_Pi1
       << ",\"c_Pi2\":" << c_Pi2 << ",\"c_P\":" << c_P << ",\"c_ell\":" << c_ell
       << ",\"c_i1\":" << c_i1 << ",\"c_i2\":" << c_i2 << ",\"c_i3\":" << c_i3
       << ",\"k_edges\":" << k_edges << ",\"c_tilde\":" << c_tilde
       << ",\"c_H1\":" << c_H1 << ",\"user_certified\":[";
    for (std::size_t i = 0; i < user_certified.size(); ++i)
        os << (i ? "," : "") << '"' << user_certified[i] << '"';
    os << "]}";
    return os.str();
}

ConstantsTable default_table() {
    ConstantsTable t;
    t.refresh_derived();
    t.validate();
    return t;
}

double riesz_cp(double p) {
    if (!(p > 1.0))
        throw std::domain_error("riesz_cp: exponent must satisfy p > 1");
    const double p_star = std::max(p, p / (p - 1.0));
    return 2.0 * (p_star - 1.0);
}

double helmholtz_c0(double p) {
    const double cp = riesz_cp(p);
    return 1.0 + std::sqrt(3.0) * cp * cp;
}

double helmholtz_c1(double p) {
    const double cp = riesz_cp(p);
    const double p_star = std::max(p, p / (p - 1.0));
    return 1.0 + std::pow(3.0, (p_star - 1.0) / p_star) * cp * cp;
}

}  // namespace nsverify
