#include "bsync/gfpoly.hpp"

#include "bsync/errors.hpp"

namespace bsync {

void GfPoly::trim() {
    while (!c_.empty() && f_->is_zero(c_.back().data())) c_.pop_back();
}

GfPoly GfPoly::one(const Gf& f) { return GfPoly(f, {f.one()}); }

GfPoly GfPoly::monomial(const Gf& f, size_t degree, const Gf::Elem& coeff) {
    if (f.is_zero(coeff.data())) return GfPoly(f);
    std::vector<Gf::Elem> c(degree + 1, f.zero());
    c[degree] = coeff;
    return GfPoly(f, std::move(c));
}

Gf::Elem GfPoly::coeff(size_t i) const { return i < c_.size() ? c_[i] : f_->zero(); }

void GfPoly::set_coeff(size_t i, const Gf::Elem& v) {
    if (i >= c_.size()) {
        if (f_->is_zero(v.data())) return;
        c_.resize(i + 1, f_->zero());
    }
    c_[i] = v;
    trim();
}

GfPoly GfPoly::add(const GfPoly& o) const {
    std::vector<Gf::Elem> c(std::max(c_.size(), o.c_.size()), f_->zero());
    for (size_t i = 0; i < c.size(); ++i) {
        if (i < c_.size()) c[i] = c_[i];
        if (i < o.c_.size()) f_->add_inplace(c[i].data(), o.c_[i].data());
    }
    return GfPoly(*f_, std::move(c));
}

GfPoly GfPoly::mul(const GfPoly& o) const {
    if (is_zero() || o.is_zero()) return GfPoly(*f_);
    std::vector<Gf::Elem> c(c_.size() + o.c_.size() - 1, f_->zero());
    Gf::Elem t = f_->zero();
    for (size_t i = 0; i < c_.size(); ++i) {
        if (f_->is_zero(c_[i].data())) continue;
        for (size_t j = 0; j < o.c_.size(); ++j) {
            f_->mul(t.data(), c_[i].data(), o.c_[j].data());
            f_->add_inplace(c[i + j].data(), t.data());
        }
    }
    return GfPoly(*f_, std::move(c));
}

GfPoly GfPoly::mul_scalar(const Gf::Elem& s) const {
    std::vector<Gf::Elem> c(c_.size(), f_->zero());
    for (size_t i = 0; i < c_.size(); ++i) f_->mul(c[i].data(), c_[i].data(), s.data());
    return GfPoly(*f_, std::move(c));
}

GfPoly GfPoly::shift(size_t k) const {
    if (is_zero()) return GfPoly(*f_);
    std::vector<Gf::Elem> c(c_.size() + k, f_->zero());
    for (size_t i = 0; i < c_.size(); ++i) c[i + k] = c_[i];
    return GfPoly(*f_, std::move(c));
}

std::pair<GfPoly, GfPoly> GfPoly::divmod(const GfPoly& divisor) const {
    if (divisor.is_zero()) throw InvalidArgument("GfPoly: division by zero polynomial");
    if (deg() < divisor.deg()) return {GfPoly(*f_), *this};
    Gf::Elem inv_lead = f_->inv(divisor.lead());
    std::vector<Gf::Elem> rem = c_;
    std::vector<Gf::Elem> quo(deg() - divisor.deg() + 1, f_->zero());
    Gf::Elem q = f_->zero(), t = f_->zero();
    for (int i = deg(); i >= divisor.deg(); --i) {
        if (f_->is_zero(rem[i].data())) continue;
        f_->mul(q.data(), rem[i].data(), inv_lead.data());
        size_t off = i - divisor.deg();
        quo[off] = q;
        for (size_t j = 0; j < divisor.c_.size(); ++j) {
            f_->mul(t.data(), q.data(), divisor.c_[j].data());
            f_->add_inplace(rem[off + j].data(), t.data());
        }
    }
    return {GfPoly(*f_, std::move(quo)), GfPoly(*f_, std::move(rem))};
}

GfPoly GfPoly::monic() const {
    if (is_zero()) return *this;
    return mul_scalar(f_->inv(lead()));
}

GfPoly GfPoly::derivative() const {
    // characteristic 2: (z^i)' = z^(i-1) for odd i, else 0
    if (c_.size() <= 1) return GfPoly(*f_);
    std::vector<Gf::Elem> c(c_.size() - 1, f_->zero());
    for (size_t i = 1; i < c_.size(); i += 2) c[i - 1] = c_[i];
    return GfPoly(*f_, std::move(c));
}

Gf::Elem GfPoly::eval(const Gf::Elem& at) const {
    Gf::Elem acc = f_->zero();
    for (size_t i = c_.size(); i-- > 0;) {
        f_->mul(acc.data(), acc.data(), at.data());
        f_->add_inplace(acc.data(), c_[i].data());
    }
    return acc;
}

GfPoly GfPoly::gcd(GfPoly a, GfPoly b) {
    while (!b.is_zero()) {
        GfPoly r = a.mod(b);
        a = std::move(b);
        b = std::move(r);
    }
    return a.monic();
}

GfPoly GfPoly::interpolate(const Gf& f, const std::vector<Gf::Elem>& xs,
                           const std::vector<Gf::Elem>& ys) {
    if (xs.size() != ys.size()) throw InvalidArgument("interpolate: point count mismatch");
    // Newton's divided differences, O(n^2)
    size_t n = xs.size();
    std::vector<Gf::Elem> dd = ys;
    Gf::Elem t = f.zero();
    for (size_t lvl = 1; lvl < n; ++lvl)
        for (size_t i = n; i-- > lvl;) {
            // (dd[i] - dd[i-1]) / (x_i - x_{i-lvl})
            f.add_inplace(dd[i].data(), dd[i - 1].data());
            Gf::Elem dx = f.add(xs[i], xs[i - lvl]);
            if (f.is_zero(dx.data())) throw InvalidArgument("interpolate: repeated x");
            f.inv(t.data(), dx.data());
            f.mul(dd[i].data(), dd[i].data(), t.data());
        }
    GfPoly result(f);
    for (size_t i = n; i-- > 0;) {
        // result = result * (z - x_i) + dd[i]
        GfPoly lin(f, {xs[i], f.one()});
        result = result.mul(lin).add(GfPoly(f, {dd[i]}));
    }
    return result;
}

}  // namespace bsync
