#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "bsync/gf2.hpp"

namespace bsync {

// Dense univariate polynomial over GF(2^m).  Coefficient i multiplies z^i;
// the coefficient vector never has trailing zeros (zero poly = empty).
class GfPoly {
  public:
    explicit GfPoly(const Gf& f) : f_(&f) {}
    GfPoly(const Gf& f, std::vector<Gf::Elem> coeffs) : f_(&f), c_(std::move(coeffs)) { trim(); }

    static GfPoly one(const Gf& f);
    static GfPoly monomial(const Gf& f, size_t degree, const Gf::Elem& coeff);

    const Gf& field() const { return *f_; }
    int deg() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    // coefficient of z^i (zero beyond the degree)
    Gf::Elem coeff(size_t i) const;
    const Gf::Elem& lead() const { return c_.back(); }
    void set_coeff(size_t i, const Gf::Elem& v);

    GfPoly add(const GfPoly& o) const;
    GfPoly mul(const GfPoly& o) const;
    GfPoly mul_scalar(const Gf::Elem& s) const;
    GfPoly shift(size_t k) const;  // * z^k
    // division with remainder; divisor must be nonzero
    std::pair<GfPoly, GfPoly> divmod(const GfPoly& divisor) const;
    GfPoly mod(const GfPoly& divisor) const { return divmod(divisor).second; }
    GfPoly monic() const;  // scale so the leading coefficient is 1
    GfPoly derivative() const;
    Gf::Elem eval(const Gf::Elem& at) const;

    static GfPoly gcd(GfPoly a, GfPoly b);  // monic gcd
    // unique polynomial of degree < |xs| through the given points (xs distinct)
    static GfPoly interpolate(const Gf& f, const std::vector<Gf::Elem>& xs,
                              const std::vector<Gf::Elem>& ys);

    bool operator==(const GfPoly& o) const { return c_ == o.c_; }

  private:
    void trim();
    const Gf* f_;
    std::vector<Gf::Elem> c_;
};

}  // namespace bsync
