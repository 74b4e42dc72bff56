#include "bsync/block_edit.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "bsync/errors.hpp"

namespace bsync {

BlockEditOp BlockEditOp::insert(uint64_t pos, Bits payload) {
    BlockEditOp op;
    op.kind = Kind::Insert;
    op.pos = pos;
    op.payload = std::move(payload);
    return op;
}

BlockEditOp BlockEditOp::remove(uint64_t pos, uint64_t len) {
    BlockEditOp op;
    op.kind = Kind::Delete;
    op.pos = pos;
    op.len = len;
    return op;
}

BlockEditOp BlockEditOp::transpose(uint64_t i, uint64_t l, uint64_t j) {
    BlockEditOp op;
    op.kind = Kind::Transpose;
    op.pos = i;
    op.len = l;
    op.dest = j;
    return op;
}

uint64_t BlockEditOp::t_cost() const {
    switch (kind) {
        case Kind::Insert: return payload.size();
        case Kind::Delete: return len;
        case Kind::Transpose: return 0;
    }
    return 0;
}

uint64_t BlockEditTrace::t_used() const {
    uint64_t t = 0;
    for (const auto& op : ops) t += op.t_cost();
    return t;
}

void BlockEditTrace::validate_budgets() const {
    if (ops.size() > k_budget)
        throw InvalidArgument("trace has " + std::to_string(ops.size()) + " ops, k budget " +
                              std::to_string(k_budget));
    if (t_used() > t_budget)
        throw InvalidArgument("trace moves " + std::to_string(t_used()) + " bits, t budget " +
                              std::to_string(t_budget));
}

Bits apply_op(const Bits& x, const BlockEditOp& op) {
    const uint64_t n = x.size();
    switch (op.kind) {
        case BlockEditOp::Kind::Insert: {
            if (op.pos < 1 || op.pos > n + 1)
                throw InvalidArgument("insert pos " + std::to_string(op.pos) + " outside [1, " +
                                      std::to_string(n + 1) + "]");
            if (op.payload.empty()) throw InvalidArgument("insert payload empty");
            Bits out = x.slice(0, op.pos - 1);
            out.append(op.payload);
            out.append(x.slice(op.pos - 1, n - (op.pos - 1)));
            return out;
        }
        case BlockEditOp::Kind::Delete: {
            if (op.len < 1) throw InvalidArgument("delete len must be >= 1");
            if (op.pos < 1 || op.pos + op.len - 1 > n)
                throw InvalidArgument("delete [" + std::to_string(op.pos) + ", +" +
                                      std::to_string(op.len) + ") outside string of length " +
                                      std::to_string(n));
            Bits out = x.slice(0, op.pos - 1);
            out.append(x.slice(op.pos - 1 + op.len, n - (op.pos - 1) - op.len));
            return out;
        }
        case BlockEditOp::Kind::Transpose: {
            const uint64_t i = op.pos, l = op.len, j = op.dest;
            if (l < 1) throw InvalidArgument("transpose len must be >= 1");
            if (i < 1 || i + l > n + 1)
                throw InvalidArgument("transpose block [" + std::to_string(i) + ", +" +
                                      std::to_string(l) + ") outside string of length " +
                                      std::to_string(n));
            const bool left = j < i, right = (j >= i + l && j <= n);
            if (!left && !right)
                throw InvalidArgument("transpose dest " + std::to_string(j) +
                                      " inside the moved block");
            Bits u = x.slice(i - 1, l);
            // Destination indices refer to the string before removal.
            if (left) {
                Bits out = x.slice(0, j);
                out.append(u);
                out.append(x.slice(j, i - 1 - j));
                out.append(x.slice(i - 1 + l, n - (i - 1) - l));
                return out;
            }
            Bits out = x.slice(0, i - 1);
            out.append(x.slice(i - 1 + l, j - (i - 1) - l));
            out.append(u);
            out.append(x.slice(j, n - j));
            return out;
        }
    }
    throw InvalidArgument("unknown op kind");
}

Bits apply_trace(const Bits& x, const BlockEditTrace& trace) {
    trace.validate_budgets();
    Bits cur = x;
    for (size_t idx = 0; idx < trace.ops.size(); ++idx) {
        try {
            cur = apply_op(cur, trace.ops[idx]);
        } catch (const InvalidArgument& e) {
            throw InvalidArgument("op " + std::to_string(idx + 1) + ": " + e.what());
        }
    }
    return cur;
}

namespace {

uint64_t geometric_capped(Rng& rng, uint64_t cap) {
    // 1 + Geom(1/2), capped.  cap >= 1.
    uint64_t v = 1;
    while (v < cap && (rng() & 1)) ++v;
    return v;
}

}  // namespace

BlockEditTrace sample_trace(uint64_t rng_seed, size_t n, uint64_t k, uint64_t t) {
    Rng rng(rng_seed);
    BlockEditTrace trace;
    trace.k_budget = k;
    trace.t_budget = t;
    uint64_t cur_len = n;
    uint64_t t_left = t;
    for (uint64_t op_i = 0; op_i < k; ++op_i) {
        // Feasibility per kind at the current state.
        const bool can_insert = t_left >= 1;
        const bool can_delete = t_left >= 1 && cur_len >= 1;
        const bool can_transpose = cur_len >= 1;
        if (!can_insert && !can_delete && !can_transpose) break;
        int kind;
        do {
            kind = static_cast<int>(rng() % 3);
        } while ((kind == 0 && !can_insert) || (kind == 1 && !can_delete) ||
                 (kind == 2 && !can_transpose));
        if (kind == 0) {
            uint64_t len = geometric_capped(rng, t_left);
            uint64_t pos = 1 + rng() % (cur_len + 1);
            Bits payload(len);
            for (uint64_t b = 0; b < len; ++b) payload.set(b, static_cast<int>(rng() & 1));
            trace.ops.push_back(BlockEditOp::insert(pos, payload));
            cur_len += len;
            t_left -= len;
        } else if (kind == 1) {
            uint64_t len = geometric_capped(rng, std::min(t_left, cur_len));
            uint64_t pos = 1 + rng() % (cur_len - len + 1);
            trace.ops.push_back(BlockEditOp::remove(pos, len));
            cur_len -= len;
            t_left -= len;
        } else {
            uint64_t l = geometric_capped(rng, cur_len);
            uint64_t i = 1 + rng() % (cur_len - l + 1);
            // j ∈ {0..i-1} ∪ {i+l..cur_len}: i + (cur_len - l - i + 1) choices.
            uint64_t n_dest = cur_len - l + 1;
            uint64_t pick = rng() % n_dest;
            uint64_t j = pick < i ? pick : pick - i + (i + l);
            trace.ops.push_back(BlockEditOp::transpose(i, l, j));
        }
    }
    return trace;
}

size_t lcs(const Bits& x, const Bits& y) {
    const size_t n = x.size(), m = y.size();
    std::vector<size_t> prev(m + 1, 0), cur(m + 1, 0);
    for (size_t i = 1; i <= n; ++i) {
        for (size_t j = 1; j <= m; ++j) {
            if (x[i - 1] == y[j - 1])
                cur[j] = prev[j - 1] + 1;
            else
                cur[j] = std::max(prev[j], cur[j - 1]);
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

size_t edit_distance(const Bits& x, const Bits& y) {
    return x.size() + y.size() - 2 * lcs(x, y);
}

std::vector<Bits> enumerate_ball(const Bits& x, uint64_t k, uint64_t t) {
    if (x.size() > 12 || k > 2 || t > 4)
        throw InvalidArgument("enumerate_ball guard: |x| <= 12, k <= 2, t <= 4");
    // frontier: string -> least t spent reaching it with the current op count
    std::map<std::string, uint64_t> reached{{x.to_string(), 0}};
    std::map<std::string, uint64_t> frontier = reached;
    for (uint64_t step = 0; step < k; ++step) {
        std::map<std::string, uint64_t> next;
        for (const auto& [s, spent] : frontier) {
            Bits cur = Bits::from_string(s);
            const uint64_t n = cur.size();
            const uint64_t t_left = t - spent;
            std::vector<BlockEditOp> ops;
            for (uint64_t len = 1; len <= t_left; ++len)
                for (uint64_t pos = 1; pos <= n + 1; ++pos)
                    for (uint64_t v = 0; v < (uint64_t{1} << len); ++v) {
                        Bits payload(len);
                        for (uint64_t b = 0; b < len; ++b)
                            payload.set(b, static_cast<int>((v >> (len - 1 - b)) & 1));
                        ops.push_back(BlockEditOp::insert(pos, payload));
                    }
            for (uint64_t len = 1; len <= std::min(t_left, n); ++len)
                for (uint64_t pos = 1; pos + len - 1 <= n; ++pos)
                    ops.push_back(BlockEditOp::remove(pos, len));
            for (uint64_t l = 1; l <= n; ++l)
                for (uint64_t i = 1; i + l <= n + 1; ++i) {
                    for (uint64_t j = 0; j < i; ++j) ops.push_back(BlockEditOp::transpose(i, l, j));
                    for (uint64_t j = i + l; j <= n; ++j)
                        ops.push_back(BlockEditOp::transpose(i, l, j));
                }
            for (const auto& op : ops) {
                Bits out = apply_op(cur, op);
                uint64_t spent2 = spent + op.t_cost();
                std::string key = out.to_string();
                auto it = next.find(key);
                if (it == next.end() || it->second > spent2) next[key] = spent2;
            }
        }
        for (const auto& [s, spent] : next) {
            auto it = reached.find(s);
            if (it == reached.end() || it->second > spent) reached[s] = spent;
        }
        frontier = std::move(next);
    }
    std::vector<Bits> out;
    out.reserve(reached.size());
    for (const auto& [s, spent] : reached) {
        (void)spent;
        out.push_back(Bits::from_string(s));
    }
    return out;
}

std::string format_trace(const BlockEditTrace& trace) {
    std::ostringstream os;
    os << "TRACE v1 k=" << trace.k_budget << " t=" << trace.t_budget << "\n";
    for (const auto& op : trace.ops) {
        switch (op.kind) {
            case BlockEditOp::Kind::Insert:
                os << "I " << op.pos << " " << op.payload.to_string() << "\n";
                break;
            case BlockEditOp::Kind::Delete:
                os << "D " << op.pos << " " << op.len << "\n";
                break;
            case BlockEditOp::Kind::Transpose:
                os << "T " << op.pos << " " << op.len << " " << op.dest << "\n";
                break;
        }
    }
    return os.str();
}

BlockEditTrace parse_trace(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line)) throw FormatError("trace: empty input");
    BlockEditTrace trace;
    {
        std::istringstream hs(line);
        std::string tag, ver, kf, tf;
        hs >> tag >> ver >> kf >> tf;
        if (tag != "TRACE" || ver != "v1" || kf.rfind("k=", 0) != 0 || tf.rfind("t=", 0) != 0)
            throw FormatError("trace: bad header '" + line + "'");
        try {
            trace.k_budget = std::stoull(kf.substr(2));
            trace.t_budget = std::stoull(tf.substr(2));
        } catch (const std::exception&) {
            throw FormatError("trace: bad budgets in header '" + line + "'");
        }
    }
    size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string kind;
        ls >> kind;
        auto fail = [&] { throw FormatError("trace line " + std::to_string(line_no) + ": '" + line + "'"); };
        if (kind == "I") {
            uint64_t pos;
            std::string bits;
            if (!(ls >> pos >> bits)) fail();
            trace.ops.push_back(BlockEditOp::insert(pos, Bits::from_string(bits)));
        } else if (kind == "D") {
            uint64_t pos, len;
            if (!(ls >> pos >> len)) fail();
            trace.ops.push_back(BlockEditOp::remove(pos, len));
        } else if (kind == "T") {
            uint64_t i, l, j;
            if (!(ls >> i >> l >> j)) fail();
            trace.ops.push_back(BlockEditOp::transpose(i, l, j));
        } else {
            fail();
        }
    }
    return trace;
}

}  // namespace bsync
