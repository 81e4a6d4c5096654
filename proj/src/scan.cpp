#include "cftower/scan/scan.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "cftower/engine/massey.hpp"
#include "cftower/quad/quadclass.hpp"
#include "cftower/unram/unram.hpp"
#include "json.hpp"

namespace cft::scan {

using json = nlohmann::json;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// FNV-1a over the decimal expansions of the certificate witnesses.
struct Digest {
    std::uint64_t h = 1469598103934665603ull;
    void feed(const std::string& s) {
        for (unsigned char ch : s) {
            h ^= ch;
            h *= 1099511628211ull;
        }
        feed_sep();
    }
    void feed_sep() {
        h ^= 0xff;
        h *= 1099511628211ull;
    }
    void feed(const mpz_class& z) { feed(z.get_str()); }
    void feed(const mpq_class& q) { feed(q.get_str()); }
    void feed(const nf::NfElem& e) {
        for (const auto& t : e.num) feed(t);
        feed(e.den);
    }
    void feed(const exact::IntMatrix& M) {
        for (std::size_t i = 0; i < M.rows(); ++i)
            for (std::size_t j = 0; j < M.cols(); ++j) feed(M(i, j));
    }
    void feed(const nf::FracIdeal& I) {
        feed(I.num);
        feed(I.den);
    }
    void feed(const quad::QuadIdeal& I) {
        feed(I.basis);
        feed(I.den);
    }
    std::string hex() const {
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
        return buf;
    }
};

std::string digest_certificates(const engine::ZassenhausMatrix& Z) {
    Digest d;
    d.feed(Z.p);
    d.feed(Z.D);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            const engine::MasseyCertificate& c = Z.certificates[i][j];
            d.feed(c.value);
            for (const auto& t : c.x.values_on_generators) d.feed(t);
            for (const auto& t : c.y.values_on_generators) d.feed(t);
            d.feed(c.argument.a_prime.u);
            d.feed(c.argument.a_prime.v);
            d.feed(c.argument.J);
            d.feed(c.a);
            d.feed(c.b);
            d.feed(c.I);
            d.feed(c.u);
            d.feed(c.Jp);
            d.feed(c.Ip);
            d.feed(mpz_class(static_cast<unsigned long>(c.choice_seed)));
        }
    return d.hex();
}

void validate(const ScanConfig& cfg) {
    if (cfg.disc_min > cfg.disc_max || cfg.disc_max >= 0)
        throw std::invalid_argument("scan range must satisfy disc_min <= disc_max < 0");
    if (!(cfg.per_entry_time_limit_seconds > 0))
        throw std::invalid_argument("per-entry time limit must be positive");
    mpz_class p(cfg.p);
    if (cfg.p < 3 || mpz_probab_prime_p(p.get_mpz_t(), 40) == 0)
        throw std::invalid_argument("p must be an odd prime");
    if (cfg.parallelism == 0) throw std::invalid_argument("parallelism must be >= 1");
}

void fill_classification(ZassenhausRecord& r, const tower::Classification& cl) {
    r.verdict = verdict_name(cl.verdict);
    r.reason = cl.reason;
    r.or_infinite = cl.or_infinite;
    r.types.clear();
    if (cl.type_constraint)
        r.types.assign(cl.type_constraint->begin(), cl.type_constraint->end());
}

// Computes the record for one fundamental discriminant; nullopt when the
// p-rank is not 2 (such fields are filtered out of the output).
std::optional<ZassenhausRecord> compute_record(
    const ScanConfig& cfg, long D, const std::vector<unram::ExtensionProviderRecord>& provider) {
    mpz_class Dz(D), p(cfg.p);
    auto t0 = std::chrono::steady_clock::now();
    quad::ClassGroupQF G(Dz);
    double t_cg = seconds_since(t0);
    if (G.p_rank(p) != 2) return std::nullopt;

    ZassenhausRecord r;
    r.p = cfg.p;
    r.D = D;
    r.p_rank = 2;
    for (const auto& f : G.invariant_factors()) r.invariant_factors.push_back(f.get_si());
    if (cfg.p == 3) {
        r.nine_divides_both = true;
        for (const auto& f : G.invariant_factors())
            if (f % 3 == 0 && f % 9 != 0) r.nine_divides_both = false;
    }
    r.time_limit = cfg.per_entry_time_limit_seconds;
    r.grh_assumed = cfg.grh;
    r.seed = cfg.seed;
    if (cfg.record_timings) r.wall_class_group = t_cg;

    engine::EngineOptions opt;
    opt.entry_budget_seconds = cfg.per_entry_time_limit_seconds;
    opt.class_group_policy.grh_assumed = cfg.grh;
    opt.class_group_policy.seed = cfg.seed;
    auto t1 = std::chrono::steady_clock::now();
    try {
        engine::ZassenhausMatrix Z = engine::zassenhaus_matrix(Dz, p, provider, opt);
        r.status = "ok";
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) r.zm.push_back(Z.entries[i][j].get_si());
        r.zm_rank = static_cast<int>(Z.rank);
        r.cert_digest = digest_certificates(Z);
        exact::IntMatrix M(2, 2);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) M(i, j) = Z.entries[i][j];
        fill_classification(r, tower::classify(p, G.invariant_factors(), M));
    } catch (const engine::BudgetExceeded& e) {
        r.status = "timeout";
        r.detail = e.what();
    } catch (const std::exception& e) {
        r.status = "error";
        r.detail = e.what();
    }
    if (cfg.record_timings) r.wall_zassenhaus = seconds_since(t1);
    return r;
}

std::vector<long> candidate_discs(const ScanConfig& cfg) {
    std::vector<long> v;
    for (long D = cfg.disc_max; D >= cfg.disc_min; --D)
        if (D < -4 && quad::is_fundamental_discriminant(mpz_class(D))) v.push_back(D);
    return v;
}

// Runs `work` over indices [0, n) with cfg.parallelism workers and hands the
// results to `emit` strictly in index order.
template <typename Work, typename Emit>
void ordered_pool(unsigned jobs, std::size_t n, Work work, Emit emit) {
    if (jobs <= 1) {
        for (std::size_t i = 0; i < n; ++i) emit(work(i));
        return;
    }
    std::mutex mu;
    std::condition_variable cv;
    std::map<std::size_t, std::optional<ZassenhausRecord>> done;
    std::atomic<std::size_t> next{0};
    std::size_t emitted = 0;
    std::exception_ptr err;
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            std::optional<ZassenhausRecord> r;
            try {
                r = work(i);
            } catch (...) {
                std::lock_guard<std::mutex> lk(mu);
                if (!err) err = std::current_exception();
                cv.notify_all();
                return;
            }
            std::lock_guard<std::mutex> lk(mu);
            done.emplace(i, std::move(r));
            cv.notify_all();
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
    {
        std::unique_lock<std::mutex> lk(mu);
        while (emitted < n && !err) {
            auto it = done.find(emitted);
            if (it == done.end()) {
                cv.wait(lk);
                continue;
            }
            emit(std::move(it->second));
            done.erase(it);
            ++emitted;
        }
    }
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace

const char* verdict_name(tower::Verdict v) {
    switch (v) {
        case tower::Verdict::LengthZero: return "LengthZero";
        case tower::Verdict::LengthOne: return "LengthOne";
        case tower::Verdict::Infinite: return "Infinite";
        case tower::Verdict::GSInconclusive: return "GSInconclusive";
    }
    return "?";
}

std::string ZassenhausRecord::to_json_line() const {
    json j;
    j["schema"] = schema_version;
    j["p"] = p;
    j["D"] = D;
    j["inv"] = invariant_factors;
    j["p_rank"] = p_rank;
    if (p == 3) j["nine_both"] = nine_divides_both;
    j["status"] = status;
    if (!detail.empty()) j["detail"] = detail;
    if (status == "ok") {
        j["zm"] = zm;
        j["zm_rank"] = zm_rank;
        j["verdict"] = verdict;
        j["reason"] = reason;
        j["or_infinite"] = or_infinite;
        json t = json::array();
        for (const auto& [a, b] : types) t.push_back({a, b});
        j["types"] = t;
        j["digest"] = cert_digest;
    }
    j["time_limit"] = time_limit;
    j["grh"] = grh_assumed;
    j["seed"] = seed;
    if (wall_class_group >= 0) j["wall_class_group"] = wall_class_group;
    if (wall_zassenhaus >= 0) j["wall_zassenhaus"] = wall_zassenhaus;
    return j.dump();
}

ZassenhausRecord ZassenhausRecord::from_json_line(const std::string& line, std::size_t line_no) {
    json j;
    try {
        j = json::parse(line);
    } catch (const std::exception& e) {
        throw CorruptCache(line_no, e.what());
    }
    try {
        ZassenhausRecord r;
        r.schema_version = j.at("schema").get<int>();
        if (r.schema_version != 1)
            throw std::runtime_error("unknown schema version " +
                                     std::to_string(r.schema_version));
        r.p = j.at("p").get<unsigned>();
        r.D = j.at("D").get<long>();
        r.invariant_factors = j.at("inv").get<std::vector<long>>();
        r.p_rank = j.at("p_rank").get<unsigned>();
        if (r.p == 3) r.nine_divides_both = j.at("nine_both").get<bool>();
        r.status = j.at("status").get<std::string>();
        r.detail = j.value("detail", std::string());
        if (r.status == "ok") {
            r.zm = j.at("zm").get<std::vector<long>>();
            r.zm_rank = j.at("zm_rank").get<int>();
            r.verdict = j.at("verdict").get<std::string>();
            r.reason = j.at("reason").get<std::string>();
            r.or_infinite = j.at("or_infinite").get<bool>();
            for (const auto& t : j.at("types"))
                r.types.emplace_back(t.at(0).get<int>(), t.at(1).get<int>());
            r.cert_digest = j.at("digest").get<std::string>();
        }
        r.time_limit = j.at("time_limit").get<double>();
        r.grh_assumed = j.at("grh").get<bool>();
        r.seed = j.at("seed").get<std::uint64_t>();
        r.wall_class_group = j.value("wall_class_group", -1.0);
        r.wall_zassenhaus = j.value("wall_zassenhaus", -1.0);
        return r;
    } catch (const CorruptCache&) {
        throw;
    } catch (const std::exception& e) {
        throw CorruptCache(line_no, e.what());
    }
}

std::vector<ZassenhausRecord> load_records(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<ZassenhausRecord> out;
    std::string line;
    std::size_t ln = 0;
    while (std::getline(in, line)) {
        ++ln;
        if (line.empty()) continue;
        out.push_back(ZassenhausRecord::from_json_line(line, ln));
    }
    return out;
}

std::vector<ZassenhausRecord> scan(const ScanConfig& cfg) {
    validate(cfg);
    std::vector<unram::ExtensionProviderRecord> provider;
    if (!cfg.provider_path.empty()) provider = unram::parse_provider_file(cfg.provider_path);
    std::vector<long> cands = candidate_discs(cfg);

    std::ofstream out;
    if (!cfg.output_path.empty()) {
        out.open(cfg.output_path, std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + cfg.output_path);
    }
    std::vector<ZassenhausRecord> produced;
    ordered_pool(
        cfg.parallelism, cands.size(),
        [&](std::size_t i) { return compute_record(cfg, cands[i], provider); },
        [&](std::optional<ZassenhausRecord> r) {
            if (!r) return;
            if (out.is_open()) out << r->to_json_line() << '\n' << std::flush;
            produced.push_back(std::move(*r));
        });
    return produced;
}

std::vector<ZassenhausRecord> resume(const ScanConfig& cfg) {
    validate(cfg);
    std::vector<ZassenhausRecord> old;
    {
        std::ifstream probe(cfg.output_path);
        if (probe) old = load_records(cfg.output_path);
    }
    std::map<long, const ZassenhausRecord*> by_d;
    for (const auto& r : old) by_d[r.D] = &r;

    std::vector<unram::ExtensionProviderRecord> provider;
    if (!cfg.provider_path.empty()) provider = unram::parse_provider_file(cfg.provider_path);

    std::vector<ZassenhausRecord> final_set;
    for (long D : candidate_discs(cfg)) {
        auto it = by_d.find(D);
        bool reuse = it != by_d.end() &&
                     !(it->second->status == "timeout" &&
                       cfg.per_entry_time_limit_seconds > it->second->time_limit);
        if (reuse) {
            final_set.push_back(*it->second);
            continue;
        }
        std::optional<ZassenhausRecord> r = compute_record(cfg, D, provider);
        if (r) final_set.push_back(std::move(*r));
    }

    if (!cfg.output_path.empty()) {
        // Append when the existing file is a prefix of the final content,
        // otherwise rewrite atomically.
        std::vector<std::string> lines;
        lines.reserve(final_set.size());
        for (const auto& r : final_set) lines.push_back(r.to_json_line());
        std::vector<std::string> existing;
        {
            std::ifstream in(cfg.output_path);
            std::string l;
            while (in && std::getline(in, l))
                if (!l.empty()) existing.push_back(l);
        }
        bool prefix = existing.size() <= lines.size();
        for (std::size_t i = 0; prefix && i < existing.size(); ++i)
            prefix = existing[i] == lines[i];
        if (prefix) {
            std::ofstream outa(cfg.output_path, std::ios::app);
            for (std::size_t i = existing.size(); i < lines.size(); ++i)
                outa << lines[i] << '\n' << std::flush;
        } else {
            std::string tmp = cfg.output_path + ".tmp";
            {
                std::ofstream outw(tmp, std::ios::trunc);
                for (const auto& l : lines) outw << l << '\n';
            }
            std::rename(tmp.c_str(), cfg.output_path.c_str());
        }
    }
    return final_set;
}

tower::Classification classify_record(const ZassenhausRecord& r) {
    if (r.status != "ok") throw std::invalid_argument("record has no completed matrix");
    std::vector<mpz_class> inv;
    for (long f : r.invariant_factors) inv.emplace_back(f);
    exact::IntMatrix M(2, 2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) M(i, j) = r.zm[std::size_t(i) * 2 + j];
    return tower::classify(mpz_class(r.p), inv, M);
}

std::string report(const std::vector<ZassenhausRecord>& records) {
    std::ostringstream os;
    std::map<std::string, std::vector<const ZassenhausRecord*>> groups;
    std::map<unsigned, std::size_t> counts;
    std::size_t incomplete = 0;
    for (const auto& r : records) {
        ++counts[r.p];
        if (r.status == "ok")
            groups[r.verdict].push_back(&r);
        else
            ++incomplete;
    }
    for (const auto& [verdict, list] : groups) {
        os << "== classification: " << verdict << " ==\n";
        for (const auto* r : list) {
            os << "  (p, D) = (" << r->p << ", " << r->D << ")";
            if (r->zm_rank >= 0) os << "   ZM rank " << r->zm_rank;
            if (!r->types.empty()) {
                os << "   types {";
                bool first = true;
                for (const auto& [a, b] : r->types) {
                    os << (first ? "" : ", ") << "(" << a << "," << b << ")";
                    first = false;
                }
                os << "}" << (r->or_infinite ? " or infinite" : "");
            }
            os << "\n";
        }
    }
    if (incomplete) {
        os << "== incomplete (timeout/error) ==\n";
        for (const auto& r : records)
            if (r.status != "ok")
                os << "  (p, D) = (" << r.p << ", " << r.D << ")   " << r.status << "\n";
    }
    os << "== rank-2 fields in range ==\n";
    for (const auto& [p, n] : counts) os << "  p = " << p << ": " << n << "\n";
    return os.str();
}

}  // namespace cft::scan
