// command line front end: sketch/recover files, encode/decode codewords,
// corrupt inputs with budgeted adversary traces, emit sweep statistics.
#include <chrono>
#include <cstdio>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bsync/block_edit.hpp"
#include "bsync/docx_bdist.hpp"
#include "bsync/docx_levels.hpp"
#include "bsync/ecc.hpp"
#include "bsync/errors.hpp"
#include "bsync/serial.hpp"

using namespace bsync;

namespace {

struct IoError {
    std::string msg;
};

std::vector<uint8_t> read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError{"cannot open " + path};
    std::vector<uint8_t> data((std::istreambuf_iterator<char>(f)),
                              std::istreambuf_iterator<char>());
    if (f.bad()) throw IoError{"read failed on " + path};
    return data;
}

void write_file(const std::string& path, const std::vector<uint8_t>& data) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError{"cannot create " + path};
    f.write(reinterpret_cast<const char*>(data.data()), static_cast<long>(data.size()));
    if (!f) throw IoError{"write failed on " + path};
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) throw IoError{"cannot create " + path};
    f << text;
    if (!f) throw IoError{"write failed on " + path};
}

bool has_magic(const std::vector<uint8_t>& data, const char* magic) {
    if (data.size() < 4) return false;
    for (int i = 0; i < 4; ++i)
        if (data[i] != static_cast<uint8_t>(magic[i])) return false;
    return true;
}

// message files are raw bytes (n = 8 x size); anything not byte aligned
// travels in a BSY1 bit container
Bits load_bits(const std::vector<uint8_t>& data) {
    if (has_magic(data, "BSY1")) {
        ByteReader r(data);
        r.expect_magic("BSY1");
        Bits out = r.bits();
        if (!r.done()) throw FormatError("bit container: trailing bytes");
        return out;
    }
    return Bits::from_bytes(data);
}

std::vector<uint8_t> store_bits(const Bits& x) {
    if (x.size() % 8 == 0) return x.to_bytes();
    ByteWriter w;
    w.magic("BSY1");
    w.bits(x);
    return w.take();
}

SketchBackend parse_variant(const std::string& v) {
    if (v == "levels") return SketchBackend::Levels;
    if (v == "bdist") return SketchBackend::Bdist;
    throw InvalidArgument("variant must be levels or bdist");
}

// BSF1 sketch container: magic, u8 variant, u64 k, u64 t, sketch section
std::vector<uint8_t> pack_sketch(SketchBackend variant, uint64_t k, uint64_t t,
                                 const std::vector<uint8_t>& payload) {
    ByteWriter w;
    w.magic("BSF1");
    w.u8(static_cast<uint8_t>(variant));
    w.u64(k);
    w.u64(t);
    w.section(payload);
    return w.take();
}

struct PackedSketch {
    SketchBackend variant;
    uint64_t k, t;
    std::vector<uint8_t> payload;
};

PackedSketch unpack_sketch(const std::vector<uint8_t>& data) {
    ByteReader r(data);
    r.expect_magic("BSF1");
    PackedSketch s;
    uint8_t v = r.u8();
    if (v != 1 && v != 2) throw FormatError("sketch container: unknown variant");
    s.variant = static_cast<SketchBackend>(v);
    s.k = r.u64();
    s.t = r.u64();
    s.payload = r.section();
    if (!r.done()) throw FormatError("sketch container: trailing bytes");
    return s;
}

void print_levels_breakdown(const LevelsSketch& sk) {
    const LevelSchedule& s = sk.sched;
    if (s.pass_through) {
        printf("  input carried whole: %lu bits\n", static_cast<unsigned long>(s.n_true));
        return;
    }
    uint64_t desc = 0;
    for (const HashDescriptor& h : sk.h) desc += 8 * h.to_text().size();
    printf("  hash descriptors: %zu levels, %lu bits\n", sk.h.size(),
           static_cast<unsigned long>(desc));
    printf("  level-1 values: %zu x %u = %lu bits\n", sk.v1.size(), s.q,
           static_cast<unsigned long>(sk.v1.size() * s.q));
    uint64_t zbits = 0;
    for (unsigned i = 1; i <= s.L; ++i) {
        unsigned w = s.level_capped(i) ? s.q : s.level_symbol_bits(i);
        zbits += sk.z[i - 1].size() * w;
    }
    printf("  level parities: %lu bits\n", static_cast<unsigned long>(zbits));
    printf("  final content parities: %zu x %lu = %lu bits\n", sk.z_final.size(),
           static_cast<unsigned long>(s.bL()),
           static_cast<unsigned long>(sk.z_final.size() * s.bL()));
}

void print_bdist_breakdown(const BdistSketch& sk) {
    const StageParams& p = sk.params;
    printf("  anchor set sketch: %lu slots, %lu bits\n",
           static_cast<unsigned long>(2 * sk.anchors.D),
           static_cast<unsigned long>(sk.anchors.payload_bits()));
    uint64_t zbits = 0;
    for (const auto& lv : sk.refine.z) zbits += lv.size() * p.B;
    printf("  prefix-hash parities: %zu levels, %lu bits\n", sk.refine.z.size(),
           static_cast<unsigned long>(zbits));
    printf("  final content parities: %zu x %lu = %lu bits\n", sk.refine.z_final.size(),
           static_cast<unsigned long>(p.bL()),
           static_cast<unsigned long>(sk.refine.z_final.size() * p.bL()));
}

double now_ms() {
    using namespace std::chrono;
    return duration<double, std::milli>(steady_clock::now().time_since_epoch()).count();
}

std::vector<uint64_t> parse_list(const std::string& csv, const char* what) {
    std::vector<uint64_t> out;
    size_t pos = 0;
    while (pos <= csv.size()) {
        size_t comma = csv.find(',', pos);
        if (comma == std::string::npos) comma = csv.size();
        std::string tok = csv.substr(pos, comma - pos);
        if (tok.empty()) throw InvalidArgument(std::string(what) + ": empty list entry");
        out.push_back(std::stoull(tok));
        pos = comma + 1;
    }
    if (out.empty()) throw InvalidArgument(std::string(what) + ": empty list");
    return out;
}

Bits random_bits(size_t n, std::mt19937_64& rng) {
    Bits x;
    for (size_t i = 0; i < n; ++i) x.push_back(static_cast<int>(rng() & 1));
    return x;
}

int cmd_sketch(const std::string& in, const std::string& out, uint64_t k, uint64_t t,
               const std::string& variant) {
    SketchBackend bk = parse_variant(variant);
    std::vector<uint8_t> data = read_file(in);
    if (data.empty()) throw InvalidArgument("input file is empty");
    Bits x = load_bits(data);

    std::vector<uint8_t> payload;
    uint64_t logical_bits = 0;
    if (bk == SketchBackend::Levels) {
        LevelsSketch sk = alice_sketch_levels(x, k, t);
        payload = sk.serialize();
        logical_bits = sk.bit_size();
        printf("variant levels  n=%zu k=%lu t=%lu\n", x.size(), static_cast<unsigned long>(k),
               static_cast<unsigned long>(t));
        print_levels_breakdown(sk);
    } else {
        StageParams p = make_stage_params(x.size(), k, t);
        if (!is_b_distinct(x, p.B))
            throw InvalidArgument("input is not window-distinct at this length; "
                                  "use the levels variant or encode instead");
        BdistSketch sk = alice_sketch_bdist(x, k, t);
        payload = sk.serialize();
        logical_bits = sk.bit_size();
        printf("variant bdist  n=%zu k=%lu t=%lu\n", x.size(), static_cast<unsigned long>(k),
               static_cast<unsigned long>(t));
        print_bdist_breakdown(sk);
    }
    std::vector<uint8_t> packed = pack_sketch(bk, k, t, payload);
    write_file(out, packed);
    printf("  protocol payload: %lu bits\n", static_cast<unsigned long>(logical_bits));
    printf("  sketch file: %zu bytes (payload %zu)\n", packed.size(), payload.size());
    return 0;
}

int cmd_recover(const std::string& sketch_path, const std::string& in, const std::string& out) {
    PackedSketch s = unpack_sketch(read_file(sketch_path));
    Bits y = load_bits(read_file(in));

    Bits x;
    if (s.variant == SketchBackend::Levels)
        x = bob_recover_levels(y, LevelsSketch::deserialize(s.payload));
    else
        x = bob_recover_bdist(y, BdistSketch::deserialize(s.payload));

    write_file(out, store_bits(x));
    printf("recovered %zu bits from %zu corrupted bits (k=%lu t=%lu)\n", x.size(), y.size(),
           static_cast<unsigned long>(s.k), static_cast<unsigned long>(s.t));
    return 0;
}

int cmd_encode(const std::string& in, const std::string& out, uint64_t k, uint64_t t,
               const std::string& variant) {
    SketchBackend bk = parse_variant(variant);
    std::vector<uint8_t> data = read_file(in);
    if (data.empty()) throw InvalidArgument("input file is empty");
    Bits msg = load_bits(data);

    CodecParams p = make_codec_params(msg.size(), k, t, bk);
    Bits cw = encode_ecc_with(msg, p);
    write_file(out, serialize_codeword(cw, msg.size(), k, t, bk));
    printf("encoded n=%zu k=%lu t=%lu variant=%s\n", msg.size(), static_cast<unsigned long>(k),
           static_cast<unsigned long>(t), variant.c_str());
    printf("  armor: %s, %lu chunks\n",
           p.pass_through ? "message carried whole" : "sketch carried",
           static_cast<unsigned long>(p.total_chunks));
    printf("  redundancy: %lu bits\n", static_cast<unsigned long>(cw.size() - msg.size()));
    return 0;
}

int cmd_decode(const std::string& in, const std::string& out) {
    ParsedCodeword pc = parse_codeword(read_file(in));
    Bits msg = decode_ecc(pc.bits, pc.n, pc.k, pc.t, pc.backend);
    write_file(out, store_bits(msg));
    printf("decoded n=%lu k=%lu t=%lu variant=%s\n", static_cast<unsigned long>(pc.n),
           static_cast<unsigned long>(pc.k), static_cast<unsigned long>(pc.t),
           pc.backend == SketchBackend::Levels ? "levels" : "bdist");
    printf("  received %zu bits, redundancy %ld bits\n", pc.bits.size(),
           static_cast<long>(pc.bits.size()) - static_cast<long>(pc.n));
    return 0;
}

int cmd_corrupt(const std::string& in, const std::string& out, const std::string& trace_path,
                uint64_t k, uint64_t t, uint64_t seed) {
    std::vector<uint8_t> data = read_file(in);

    if (has_magic(data, "BSC1")) {
        // corrupt the codeword inside its container, keep the header
        ParsedCodeword pc = parse_codeword(data);
        BlockEditTrace tr = sample_trace(seed, pc.bits.size(), k, t);
        Bits y = apply_trace(pc.bits, tr);
        write_file(out, serialize_codeword(y, pc.n, pc.k, pc.t, pc.backend));
        if (!trace_path.empty()) write_text(trace_path, format_trace(tr));
        printf("corrupted codeword: %zu -> %zu bits, %zu ops, t_used=%lu\n", pc.bits.size(),
               y.size(), tr.ops.size(), static_cast<unsigned long>(tr.t_used()));
        return 0;
    }

    Bits x = load_bits(data);
    if (x.size() == 0) throw InvalidArgument("input file is empty");
    BlockEditTrace tr = sample_trace(seed, x.size(), k, t);
    Bits y = apply_trace(x, tr);
    write_file(out, store_bits(y));
    if (!trace_path.empty()) write_text(trace_path, format_trace(tr));
    printf("corrupted: %zu -> %zu bits, %zu ops, t_used=%lu\n", x.size(), y.size(), tr.ops.size(),
           static_cast<unsigned long>(tr.t_used()));
    return 0;
}

int cmd_stats(const std::string& ns, const std::string& ks, const std::string& ts,
              const std::string& variants, uint64_t trials, uint64_t seed,
              const std::string& out) {
    std::vector<uint64_t> nl = parse_list(ns, "--n");
    std::vector<uint64_t> kl = parse_list(ks, "--k");
    std::vector<uint64_t> tl = parse_list(ts, "--t");
    std::vector<std::string> vl;
    {
        size_t pos = 0;
        while (pos <= variants.size()) {
            size_t comma = variants.find(',', pos);
            if (comma == std::string::npos) comma = variants.size();
            vl.push_back(variants.substr(pos, comma - pos));
            parse_variant(vl.back());
            pos = comma + 1;
        }
    }
    if (trials < 1) throw InvalidArgument("--trials must be positive");

    std::string csv = "n,k,t,variant,sketch_bits,redundancy_bits,recover_ok,wall_ms\n";
    uint64_t row = 0;
    for (uint64_t n : nl)
        for (uint64_t k : kl)
            for (uint64_t t : tl)
                for (const std::string& vname : vl) {
                    SketchBackend bk = parse_variant(vname);
                    std::mt19937_64 rng(seed + 7919 * row);
                    ++row;
                    uint64_t sketch_bits = 0;
                    bool ok = true;
                    double t0 = now_ms();
                    for (uint64_t trial = 0; trial < trials; ++trial) {
                        Bits x = random_bits(n, rng);
                        if (bk == SketchBackend::Bdist) {
                            StageParams p = make_stage_params(n, k, t);
                            while (!is_b_distinct(x, p.B)) x = random_bits(n, rng);
                        }
                        Bits y = apply_trace(x, sample_trace(rng(), n, k, t));
                        try {
                            if (bk == SketchBackend::Levels) {
                                LevelsSketch sk = alice_sketch_levels(x, k, t);
                                sketch_bits = 8 * sk.serialize().size();
                                ok = ok && bob_recover_levels(y, sk) == x;
                            } else {
                                BdistSketch sk = alice_sketch_bdist(x, k, t);
                                sketch_bits = 8 * sk.serialize().size();
                                ok = ok && bob_recover_bdist(y, sk) == x;
                            }
                        } catch (const Error&) {
                            ok = false;
                        }
                    }
                    double wall = (now_ms() - t0) / double(trials);
                    uint64_t redundancy = 0;
                    try {
                        redundancy = make_codec_params(n, k, t, bk).redundancy_bits();
                    } catch (const InvalidArgument&) {
                        // cell outside codec support; reported as zero
                    }
                    char line[160];
                    snprintf(line, sizeof line, "%lu,%lu,%lu,%s,%lu,%lu,%d,%.1f\n",
                             static_cast<unsigned long>(n), static_cast<unsigned long>(k),
                             static_cast<unsigned long>(t), vname.c_str(),
                             static_cast<unsigned long>(sketch_bits),
                             static_cast<unsigned long>(redundancy), ok ? 1 : 0, wall);
                    csv += line;
                }
    if (out.empty())
        fputs(csv.c_str(), stdout);
    else
        write_text(out, csv);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"synchronize and error-correct binary strings under block edits"};
    app.require_subcommand(1);

    std::string in, out, sketch_path, trace_path, variant = "levels";
    std::string ns = "4096", ks = "2", ts = "32", variants = "levels";
    uint64_t k = 2, t = 32, seed = 1, trials = 3;

    CLI::App* c_sketch = app.add_subcommand("sketch", "summarize a file for later recovery");
    c_sketch->add_option("--in", in, "input file (raw bytes)")->required();
    c_sketch->add_option("--out", out, "sketch file to write")->required();
    c_sketch->add_option("--k", k, "block operation budget");
    c_sketch->add_option("--t", t, "inserted+deleted bit budget");
    c_sketch->add_option("--variant", variant, "levels|bdist");

    CLI::App* c_recover = app.add_subcommand("recover", "rebuild the original from sketch + corrupted copy");
    c_recover->add_option("--sketch", sketch_path, "sketch file")->required();
    c_recover->add_option("--in", in, "corrupted file")->required();
    c_recover->add_option("--out", out, "recovered file to write")->required();

    CLI::App* c_encode = app.add_subcommand("encode", "armor a message into a codeword file");
    c_encode->add_option("--in", in, "message file (raw bytes)")->required();
    c_encode->add_option("--out", out, "codeword file to write")->required();
    c_encode->add_option("--k", k, "block operation budget");
    c_encode->add_option("--t", t, "inserted+deleted bit budget");
    c_encode->add_option("--variant", variant, "levels|bdist");

    CLI::App* c_decode = app.add_subcommand("decode", "recover the message from a codeword file");
    c_decode->add_option("--in", in, "codeword file")->required();
    c_decode->add_option("--out", out, "message file to write")->required();

    CLI::App* c_corrupt = app.add_subcommand("corrupt", "apply a seeded adversary trace");
    c_corrupt->add_option("--in", in, "file to corrupt")->required();
    c_corrupt->add_option("--out", out, "corrupted file to write")->required();
    c_corrupt->add_option("--trace", trace_path, "also write the trace as text");
    c_corrupt->add_option("--k", k, "block operation budget");
    c_corrupt->add_option("--t", t, "inserted+deleted bit budget");
    c_corrupt->add_option("--seed", seed, "adversary seed");

    CLI::App* c_stats = app.add_subcommand("stats", "sweep cells and emit a CSV");
    c_stats->add_option("--n", ns, "lengths, comma separated");
    c_stats->add_option("--k", ks, "k values, comma separated");
    c_stats->add_option("--t", ts, "t values, comma separated");
    c_stats->add_option("--variant", variants, "variants, comma separated");
    c_stats->add_option("--trials", trials, "trials per cell");
    c_stats->add_option("--seed", seed, "sweep seed");
    c_stats->add_option("--out", out, "CSV file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (c_sketch->parsed()) return cmd_sketch(in, out, k, t, variant);
        if (c_recover->parsed()) return cmd_recover(sketch_path, in, out);
        if (c_encode->parsed()) return cmd_encode(in, out, k, t, variant);
        if (c_decode->parsed()) return cmd_decode(in, out);
        if (c_corrupt->parsed()) return cmd_corrupt(in, out, trace_path, k, t, seed);
        if (c_stats->parsed()) return cmd_stats(ns, ks, ts, variants, trials, seed, out);
    } catch (const IoError& e) {
        fprintf(stderr, "io error: %s\n", e.msg.c_str());
        return 4;
    } catch (const InvalidArgument& e) {
        fprintf(stderr, "usage error: %s\n", e.what());
        return 2;
    } catch (const Error& e) {
        // recovery and format failures from any pipeline stage
        fprintf(stderr, "failure: %s\n", e.what());
        return 3;
    }
    return 2;
}
