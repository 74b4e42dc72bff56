#include "bsync/set_recon.hpp"

#include <algorithm>

#include "bsync/errors.hpp"
#include "bsync/gfpoly.hpp"

namespace bsync {

namespace {

size_t elem_words(unsigned m) { return (m + 63) / 64; }

void validate_elem(const SetElem& e, unsigned m) {
    if (e.size() != elem_words(m)) throw InvalidArgument("set element: wrong word count");
    unsigned top = m % 64;
    if (top && (e.back() >> top)) throw InvalidArgument("set element: value wider than m");
}

Gf::Elem lift(const Gf& f, const SetElem& e) {
    Gf::Elem out = f.zero();
    std::copy(e.begin(), e.end(), out.begin());
    return out;
}

// the m-bit code of a field element whose bit m is clear
SetElem lower(const Gf& f, const Gf::Elem& e, unsigned m) {
    SetElem out(elem_words(m), 0);
    std::copy(e.begin(), e.begin() + elem_words(m), out.begin());
    (void)f;
    return out;
}

Gf::Elem eval_point(const Gf& f, unsigned m, uint64_t i) {
    Gf::Elem p = f.zero();
    p[0] = i;
    p[m / 64] |= uint64_t{1} << (m % 64);
    return p;
}

bool bit_m_set(const Gf::Elem& e, unsigned m) { return e[m / 64] >> (m % 64) & 1; }

std::vector<Gf::Elem> char_poly_evals(const Gf& f, unsigned m, const std::vector<SetElem>& V,
                                      uint64_t n_points) {
    std::vector<Gf::Elem> lifted;
    lifted.reserve(V.size());
    for (const SetElem& v : V) lifted.push_back(lift(f, v));
    std::vector<Gf::Elem> out;
    out.reserve(n_points);
    Gf::Elem term = f.zero();
    for (uint64_t i = 0; i < n_points; ++i) {
        Gf::Elem pt = eval_point(f, m, i);
        Gf::Elem acc = f.one();
        for (const Gf::Elem& v : lifted) {
            term = pt;
            f.add_inplace(term.data(), v.data());
            f.mul(acc.data(), acc.data(), term.data());
        }
        out.push_back(std::move(acc));
    }
    return out;
}

// Deterministic root collection for a monic polynomial expected to split
// into distinct linear factors.  Returns false if it does not.
//
// Splitting uses trace polynomials: with Z_i = z^(2^i) mod P precomputed,
// T_j(z) = sum_i (x^j)^(2^i) * Z_i takes only O(m' * deg) multiplies per
// basis direction, and some direction separates any two distinct roots.
bool collect_roots(const GfPoly& P, std::vector<Gf::Elem>& out) {
    const Gf& f = P.field();
    if (P.deg() <= 0) return true;
    if (P.deg() == 1) {
        out.push_back(P.coeff(0));
        return true;
    }
    // distinct-root requirement: P squarefree
    if (GfPoly::gcd(P, P.derivative()).deg() != 0) return false;

    const unsigned mp = f.deg();
    std::vector<GfPoly> Z;
    Z.reserve(mp);
    Z.push_back(GfPoly::monomial(f, 1, f.one()).mod(P));
    for (unsigned i = 1; i < mp; ++i) Z.push_back(Z.back().mul(Z.back()).mod(P));

    for (unsigned j = 0; j < mp; ++j) {
        Gf::Elem theta = f.pow_u64(f.x(), j);
        GfPoly T(f);
        Gf::Elem pw = theta;
        for (unsigned i = 0; i < mp; ++i) {
            T = T.add(Z[i].mul_scalar(pw));
            pw = f.sqr(pw);
        }
        GfPoly g = GfPoly::gcd(P, T);
        if (g.deg() > 0 && g.deg() < P.deg()) {
            GfPoly h = P.divmod(g).first;
            return collect_roots(g, out) && collect_roots(h, out);
        }
    }
    return false;  // no basis direction separates: P has a non-linear factor
}

}  // namespace

void SetSketch::write(ByteWriter& w) const {
    w.u32(m);
    w.u64(D);
    for (const Gf::Elem& e : evals)
        for (uint64_t word : e) w.u64(word);
}

SetSketch SetSketch::read(ByteReader& r) {
    SetSketch s;
    s.m = r.u32();
    s.D = r.u64();
    if (s.m < 1 || s.m > 4096 || s.D > (uint64_t{1} << 32))
        throw FormatError("set sketch: implausible header");
    size_t words = (s.m + 1 + 63) / 64;
    s.evals.reserve(2 * s.D);
    for (uint64_t i = 0; i < 2 * s.D; ++i) {
        Gf::Elem e(words, 0);
        for (size_t w = 0; w < words; ++w) e[w] = r.u64();
        s.evals.push_back(std::move(e));
    }
    return s;
}

SetSketch set_recon_sketch(const std::vector<SetElem>& V, unsigned m, uint64_t D) {
    if (D < 1) throw InvalidArgument("set sketch: capacity must be >= 1");
    if (m < 1) throw InvalidArgument("set sketch: element width must be >= 1");
    if (m < 63 && 2 * D > (uint64_t{1} << m))
        throw InvalidArgument("set sketch: capacity too large for element width");
    for (const SetElem& v : V) validate_elem(v, m);
    std::vector<SetElem> sorted = V;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw InvalidArgument("set sketch: elements must be distinct");
    const Gf& f = Gf::get(m + 1);
    SetSketch s;
    s.m = m;
    s.D = D;
    s.evals = char_poly_evals(f, m, V, 2 * D);
    return s;
}

std::vector<SetElem> set_recon_recover(const SetSketch& sketch, const std::vector<SetElem>& Vp) {
    const unsigned m = sketch.m;
    const uint64_t D = sketch.D;
    if (D < 1 || sketch.evals.size() != 2 * D) throw InvalidArgument("set recover: malformed sketch");
    if (m < 63 && 2 * D > (uint64_t{1} << m))
        throw InvalidArgument("set recover: capacity too large for element width");
    for (const SetElem& v : Vp) validate_elem(v, m);
    const Gf& f = Gf::get(m + 1);

    std::vector<Gf::Elem> own = char_poly_evals(f, m, Vp, 2 * D);
    std::vector<Gf::Elem> ratio(2 * D);
    bool all_one = true;
    for (uint64_t i = 0; i < 2 * D; ++i) {
        ratio[i] = f.mul(sketch.evals[i], f.inv(own[i]));
        if (ratio[i] != f.one()) all_one = false;
    }
    if (all_one) return Vp;

    std::vector<Gf::Elem> points;
    points.reserve(2 * D);
    GfPoly M = GfPoly::one(f);
    for (uint64_t i = 0; i < 2 * D; ++i) {
        points.push_back(eval_point(f, m, i));
        M = M.mul(GfPoly(f, {points.back(), f.one()}));
    }
    GfPoly F = GfPoly::interpolate(f, points, ratio);

    std::vector<SetElem> vp_sorted = Vp;
    std::sort(vp_sorted.begin(), vp_sorted.end());
    auto in_vp = [&](const SetElem& e) {
        return std::binary_search(vp_sorted.begin(), vp_sorted.end(), e);
    };

    // candidate rational fits P/Q == F (mod M) from the Euclid convergents
    GfPoly r_prev = M, r_cur = F;
    GfPoly t_prev(f), t_cur = GfPoly::one(f);
    while (true) {
        if (static_cast<uint64_t>(std::max(r_cur.deg(), 0)) <= D &&
            static_cast<uint64_t>(std::max(t_cur.deg(), 0)) <= D && !t_cur.is_zero()) {
            do {  // single-pass candidate check; break = reject
                GfPoly g = GfPoly::gcd(r_cur, t_cur);
                GfPoly P = r_cur.divmod(g).first;
                GfPoly Q = t_cur.divmod(g).first;
                Gf::Elem scale = f.inv(Q.lead());
                P = P.mul_scalar(scale);
                Q = Q.mul_scalar(scale);
                // both halves of chi_{V \ V'} / chi_{V' \ V} are monic
                if (!P.is_zero() && P.lead() != f.one()) break;
                if (P.is_zero()) break;  // chi ratios are never zero
                std::vector<Gf::Elem> add_roots, del_roots;
                if (!collect_roots(P, add_roots) || !collect_roots(Q, del_roots)) break;
                bool ok = true;
                for (const Gf::Elem& rt : add_roots)
                    if (bit_m_set(rt, m) || in_vp(lower(f, rt, m))) ok = false;
                for (const Gf::Elem& rt : del_roots)
                    if (bit_m_set(rt, m) || !in_vp(lower(f, rt, m))) ok = false;
                if (!ok) break;
                std::vector<SetElem> dels;
                for (const Gf::Elem& rt : del_roots) dels.push_back(lower(f, rt, m));
                std::sort(dels.begin(), dels.end());
                std::vector<SetElem> cand;
                for (const SetElem& v : vp_sorted)
                    if (!std::binary_search(dels.begin(), dels.end(), v)) cand.push_back(v);
                for (const Gf::Elem& rt : add_roots) cand.push_back(lower(f, rt, m));
                std::sort(cand.begin(), cand.end());
                if (std::adjacent_find(cand.begin(), cand.end()) != cand.end()) break;
                std::vector<Gf::Elem> check = char_poly_evals(f, m, cand, 2 * D);
                if (check != sketch.evals) break;
                return cand;
            } while (false);
        }
        if (r_cur.is_zero()) break;
        auto [q, rem] = r_prev.divmod(r_cur);
        GfPoly t_next = t_prev.add(q.mul(t_cur));
        r_prev = std::move(r_cur);
        r_cur = std::move(rem);
        t_prev = std::move(t_cur);
        t_cur = std::move(t_next);
    }
    throw RecoveryError("set recover: no rational fit within capacity " + std::to_string(D));
}

}  // namespace bsync
