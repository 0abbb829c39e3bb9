#include "mdlab/json_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstring>
#include <sstream>
#include <stdexcept>

namespace mdlab::io {

using nlohmann::json;

std::string code_to_json(const codes::CosetCode& code) {
    json j;
    j["q"] = code.q();
    j["n"] = code.n();
    j["k"] = code.k();
    j["seed"] = code.seed();
    std::vector<int> gen;
    gen.reserve(code.k() * code.n());
    for (std::size_t r = 0; r < code.k(); ++r)
        for (std::size_t c = 0; c < code.n(); ++c) gen.push_back(code.generator().at(r, c));
    j["generator"] = gen;
    std::vector<int> dither;
    for (std::size_t i = 0; i < code.n(); ++i) dither.push_back(code.dither()[i]);
    j["dither"] = dither;
    return j.dump(2);
}

codes::CosetCode code_from_json(const std::string& text) {
    const json j = json::parse(text);
    const std::uint32_t q = j.at("q").get<std::uint32_t>();
    const std::size_t n = j.at("n").get<std::size_t>(), k = j.at("k").get<std::size_t>();
    gf::FieldMatrix g(k, n, q);
    const auto& gen = j.at("generator");
    if (gen.size() != k * n) throw std::invalid_argument("generator size mismatch");
    for (std::size_t r = 0; r < k; ++r)
        for (std::size_t c = 0; c < n; ++c) g.set(r, c, gen[r * n + c].get<std::uint32_t>());
    const auto& dj = j.at("dither");
    if (dj.size() != n) throw std::invalid_argument("dither size mismatch");
    gf::FieldVector d(n, q);
    for (std::size_t i = 0; i < n; ++i) d.set(i, dj[i].get<std::uint32_t>());
    return codes::CosetCode(std::move(g), std::move(d), j.value("seed", std::uint64_t(0)));
}

experiments::ExperimentConfig config_from_json(const std::string& text,
                                               const experiments::ExperimentConfig& defaults) {
    const json j = json::parse(text);
    if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
    static const char* known[] = {"n",       "trials",        "seed",           "eps",
                                  "rate_pad", "best_of",      "workers",        "trellis_states",
                                  "search_retries", "pack_pad"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::find_if(std::begin(known), std::end(known),
                         [&](const char* k) { return it.key() == k; }) == std::end(known))
            throw std::invalid_argument("unknown config key: " + it.key());
    }
    experiments::ExperimentConfig cfg = defaults;
    cfg.n = j.value("n", cfg.n);
    cfg.trials = j.value("trials", cfg.trials);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.eps = j.value("eps", cfg.eps);
    cfg.rate_pad = j.value("rate_pad", cfg.rate_pad);
    cfg.best_of = j.value("best_of", cfg.best_of);
    cfg.workers = j.value("workers", cfg.workers);
    cfg.trellis_states = j.value("trellis_states", cfg.trellis_states);
    cfg.search_retries = j.value("search_retries", cfg.search_retries);
    cfg.pack_pad = j.value("pack_pad", cfg.pack_pad);
    if (cfg.n < 8) throw std::invalid_argument("config: n must be at least 8");
    if (cfg.trials < 1) throw std::invalid_argument("config: trials must be positive");
    if (!(cfg.eps > 0)) throw std::invalid_argument("config: eps must be positive");
    return cfg;
}

std::string config_to_json(const experiments::ExperimentConfig& cfg) {
    json j;
    j["n"] = cfg.n;
    j["trials"] = cfg.trials;
    j["seed"] = cfg.seed;
    j["eps"] = cfg.eps;
    j["rate_pad"] = cfg.rate_pad;
    j["best_of"] = cfg.best_of;
    j["workers"] = cfg.workers;
    j["trellis_states"] = cfg.trellis_states;
    j["search_retries"] = cfg.search_retries;
    j["pack_pad"] = cfg.pack_pad;
    return j.dump(2);
}

std::string report_to_json(const experiments::ExperimentReport& rep) {
    json j;
    j["name"] = rep.name;
    j["config"] = json::parse(config_to_json(rep.config));
    j["rates"] = rep.rates;
    j["distortions"] = rep.distortions;
    j["stats"] = rep.stats;
    return j.dump(2);
}

std::string report_to_csv(const experiments::ExperimentReport& rep) {
    std::ostringstream out;
    for (std::size_t i = 0; i < rep.trial_columns.size(); ++i)
        out << (i ? "," : "") << rep.trial_columns[i];
    out << "\r\n";
    out.precision(12);
    for (const auto& row : rep.trial_rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << "\r\n";
    }
    return out.str();
}

namespace {

sperner::SpernerFamily family_from_json(const json& j) {
    sperner::SpernerFamily f;
    for (const auto& set : j) {
        sperner::DecoderSet mask = 0;
        for (const auto& d : set) mask |= 1u << (d.get<int>() - 1);
        f.sets.push_back(mask);
    }
    std::sort(f.sets.begin(), f.sets.end());
    return f;
}

sperner::DecoderSet decoder_from_json(const json& j) {
    sperner::DecoderSet mask = 0;
    for (const auto& d : j) mask |= 1u << (d.get<int>() - 1);
    return mask;
}

json decoder_to_json(sperner::DecoderSet mask) {
    json out = json::array();
    for (int i = 0; i < 32; ++i)
        if (mask & (1u << i)) out.push_back(i + 1);
    return out;
}

}  // namespace

region::RegionSpec region_spec_from_json(const std::string& text) {
    const json j = json::parse(text);
    region::RegionSpec spec;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "egc") spec.kind = region::Kind::EGC;
    else if (kind == "zb") spec.kind = region::Kind::ZB;
    else if (kind == "ssc") spec.kind = region::Kind::SSC;
    else if (kind == "stage1") spec.kind = region::Kind::Stage1;
    else if (kind == "stage2") spec.kind = region::Kind::Stage2;
    else if (kind == "stage3") spec.kind = region::Kind::Stage3;
    else if (kind == "stage4") spec.kind = region::Kind::Stage4;
    else throw std::invalid_argument("unknown region kind " + kind);
    spec.l = j.at("l").get<int>();
    spec.q = j.value("q", 2u);
    spec.source_var = j.value("source_var", std::string("X"));
    spec.ts_var = j.value("ts_var", std::string(""));

    std::vector<info::Variable> vars;
    for (const auto& v : j.at("variables"))
        vars.push_back({v.at("name").get<std::string>(), v.at("alphabet").get<int>()});
    spec.pmf = info::JointPmf(vars, j.at("probs").get<std::vector<double>>());

    if (j.contains("aux"))
        for (const auto& a : j.at("aux"))
            spec.aux[family_from_json(a.at("family"))] = a.at("var").get<std::string>();

    if (j.contains("summations"))
        for (const auto& s : j.at("summations")) {
            region::Summation sum;
            sum.q = s.value("q", spec.q);
            for (const auto& f : s.at("families")) sum.families.push_back(family_from_json(f));
            sum.v_vars = s.at("vars").get<std::vector<std::string>>();
            sum.sum_family = family_from_json(s.at("sum_family"));
            spec.summations.push_back(std::move(sum));
        }

    if (j.contains("decoders"))
        for (const auto& d : j.at("decoders")) {
            region::DecoderSpec dec;
            dec.decoder = decoder_from_json(d.at("decoder"));
            dec.recon.inputs = d.at("inputs").get<std::vector<std::string>>();
            dec.recon.table = d.at("table").get<std::vector<int>>();
            const auto& dist = d.at("distortion");
            if (dist.is_string() && dist.get<std::string>() == "hamming") {
                dec.distortion = info::hamming_distortion(spec.pmf.alphabet(spec.source_var));
            } else {
                dec.distortion.d = dist.get<std::vector<std::vector<double>>>();
            }
            spec.decoders.push_back(std::move(dec));
        }

    if (j.contains("covering_whitelist"))
        spec.covering_whitelist = j.at("covering_whitelist").get<std::vector<std::vector<int>>>();
    return spec;
}

region::RdVector rd_vector_from_json(const std::string& text) {
    const json j = json::parse(text);
    region::RdVector v;
    for (const auto& r : j.at("rates")) v.rates[r.at("i").get<int>()] = r.at("R").get<double>();
    if (j.contains("distortions"))
        for (const auto& d : j.at("distortions"))
            v.distortions[decoder_from_json(d.at("decoder"))] = d.at("D").get<double>();
    return v;
}

std::string membership_to_json(const region::Membership& m, const region::BoundSystem& sys) {
    json j;
    j["feasible"] = m.feasible;
    if (!m.feasible) j["reason"] = m.reason;
    if (m.feasible) j["witness"] = m.witness;
    json floors = json::array();
    for (const auto& [dec, d] : sys.distortion_of) {
        json f;
        f["decoder"] = decoder_to_json(dec);
        f["floor"] = d;
        floors.push_back(f);
    }
    j["distortion_floors"] = floors;
    return j.dump(2);
}

std::string projection_to_json(const region::ProjectedRegion& proj) {
    json j;
    json rows = json::array();
    for (const auto& r : proj.rate_rows) {
        json row;
        row["a"] = r.a;
        row["b"] = r.b;
        rows.push_back(row);
    }
    j["rate_rows"] = rows;
    json floors = json::array();
    for (const auto& [dec, d] : proj.distortion_of) {
        json f;
        f["decoder"] = decoder_to_json(dec);
        f["floor"] = d;
        floors.push_back(f);
    }
    j["distortion_floors"] = floors;
    return j.dump(2);
}

std::string figd_to_json(const experiments::FigdResult& res, double d0) {
    json j;
    j["d0"] = d0;
    j["max_value"] = res.max_value;
    j["argmax"] = {res.a0, res.a1, res.b0, res.b1};
    j["bound"] = res.bound;
    j["margin"] = res.bound - res.max_value;
    j["grid_points"] = res.grid_points;
    j["feasible_points"] = res.evaluated;
    return j.dump(2);
}

std::string figd_slice_csv(const experiments::FigdResult& res) {
    std::ostringstream out;
    out << "a0,a1,max_over_b\r\n";
    out.precision(10);
    for (const auto& row : res.slice) out << row[0] << "," << row[1] << "," << row[2] << "\r\n";
    return out.str();
}

// ---- SHA-256 (FIPS 180-4) ----

namespace {

constexpr std::uint32_t kSha256K[64] = {
    0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1, 0x923f82a4, 0xab1c5ed5,
    0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3, 0x72be5d74, 0x80deb1fe, 0x9bdc06a7, 0xc19bf174,
    0xe49b69c1, 0xefbe4786, 0x0fc19dc6, 0x240ca1cc, 0x2de92c6f, 0x4a7484aa, 0x5cb0a9dc, 0x76f988da,
    0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7, 0xc6e00bf3, 0xd5a79147, 0x06ca6351, 0x14292967,
    0x27b70a85, 0x2e1b2138, 0x4d2c6dfc, 0x53380d13, 0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85,
    0xa2bfe8a1, 0xa81a664b, 0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070,
    0x19a4c116, 0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a, 0x5b9cca4f, 0x682e6ff3,
    0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208, 0x90befffa, 0xa4506ceb, 0xbef9a3f7, 0xc67178f2};

inline std::uint32_t rotr(std::uint32_t x, int s) { return (x >> s) | (x << (32 - s)); }

}  // namespace

std::string sha256_hex(const std::string& bytes) {
    std::uint32_t h[8] = {0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
                          0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19};
    std::string msg = bytes;
    const std::uint64_t bitlen = std::uint64_t(bytes.size()) * 8;
    msg.push_back(char(0x80));
    while (msg.size() % 64 != 56) msg.push_back(0);
    for (int i = 7; i >= 0; --i) msg.push_back(char((bitlen >> (8 * i)) & 0xff));

    for (std::size_t off = 0; off < msg.size(); off += 64) {
        std::uint32_t w[64];
        for (int i = 0; i < 16; ++i) {
            w[i] = (std::uint32_t(std::uint8_t(msg[off + std::size_t(4 * i)])) << 24) |
                   (std::uint32_t(std::uint8_t(msg[off + std::size_t(4 * i + 1)])) << 16) |
                   (std::uint32_t(std::uint8_t(msg[off + std::size_t(4 * i + 2)])) << 8) |
                   std::uint32_t(std::uint8_t(msg[off + std::size_t(4 * i + 3)]));
        }
        for (int i = 16; i < 64; ++i) {
            const std::uint32_t s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
            const std::uint32_t s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
            w[i] = w[i - 16] + s0 + w[i - 7] + s1;
        }
        std::uint32_t a = h[0], b = h[1], c = h[2], d = h[3], e = h[4], f = h[5], g = h[6], hh = h[7];
        for (int i = 0; i < 64; ++i) {
            const std::uint32_t S1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
            const std::uint32_t ch = (e & f) ^ (~e & g);
            const std::uint32_t t1 = hh + S1 + ch + kSha256K[i] + w[i];
            const std::uint32_t S0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
            const std::uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
            const std::uint32_t t2 = S0 + maj;
            hh = g;
            g = f;
            f = e;
            e = d + t1;
            d = c;
            c = b;
            b = a;
            a = t1 + t2;
        }
        h[0] += a;
        h[1] += b;
        h[2] += c;
        h[3] += d;
        h[4] += e;
        h[5] += f;
        h[6] += g;
        h[7] += hh;
    }
    static const char* hexd = "0123456789abcdef";
    std::string out;
    for (std::uint32_t x : h)
        for (int i = 7; i >= 0; --i) out.push_back(hexd[(x >> (4 * i)) & 0xf]);
    return out;
}

std::string manifest_to_json(const Manifest& m) {
    json j;
    j["command"] = m.command;
    j["config_path"] = m.config_path;
    j["config_sha256"] = m.config_sha256;
    j["master_seed"] = m.master_seed;
    j["timestamp"] = m.timestamp;
    j["outputs"] = m.outputs;
    return j.dump(2);
}

}  // namespace mdlab::io
