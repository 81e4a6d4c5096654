#pragma once
// Batch scanner over fundamental discriminants: persists one JSON record per
// rank-2 field, supports resume after interruption, and renders the grouped
// (p, D) report tables.

#include <gmpxx.h>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cftower/tower/classify.hpp"

namespace cft::scan {

struct ScanConfig {
    unsigned p = 3;
    long disc_min = -1;  // most negative end of the range
    long disc_max = -1;  // least negative end; disc_min <= disc_max < 0
    double per_entry_time_limit_seconds = 300.0;
    std::string output_path;    // empty: keep records in memory only
    std::string provider_path;  // empty: no provider data
    bool grh = false;
    unsigned parallelism = 1;
    std::uint64_t seed = 1;
    // Wall-clock timings are volatile; they are only written when asked for,
    // so that default outputs are byte-identical across reruns.
    bool record_timings = false;
};

struct CorruptCache : std::runtime_error {
    std::size_t line_no;
    CorruptCache(std::size_t line, const std::string& m)
        : std::runtime_error("corrupt cache at line " + std::to_string(line) + ": " + m),
          line_no(line) {}
};

// One self-contained line of scanner output.
struct ZassenhausRecord {
    int schema_version = 1;
    unsigned p = 3;
    long D = 0;
    std::vector<long> invariant_factors;
    unsigned p_rank = 0;
    bool nine_divides_both = false;  // meaningful for p = 3 only
    std::string status;              // "ok" | "timeout" | "error"
    std::string detail;              // timeout/error text
    std::vector<long> zm;            // row-major 2x2 entries mod p when status == "ok"
    int zm_rank = -1;
    std::string verdict;  // classification verdict name, "" until classified
    std::string reason;
    bool or_infinite = false;
    std::vector<std::pair<int, int>> types;
    std::string cert_digest;  // FNV-1a over the certificate witnesses
    double time_limit = 0.0;
    bool grh_assumed = false;
    std::uint64_t seed = 1;
    double wall_class_group = -1.0;  // seconds, -1 when not recorded
    double wall_zassenhaus = -1.0;

    std::string to_json_line() const;
    static ZassenhausRecord from_json_line(const std::string& line, std::size_t line_no);
};

// Iterates fundamental discriminants from disc_max down to disc_min (i.e.
// ascending |D|), keeps only p-rank 2, computes the Zassenhaus matrix within
// the per-entry budget and classifies.  Appends each record to output_path
// (flushed per line) and returns all records produced by this call.
// Per-record timeouts/errors are captured in the record, never thrown.
std::vector<ZassenhausRecord> scan(const ScanConfig& cfg);

// Like scan, but first loads output_path and skips discriminants already
// holding a terminal record.  Timeout records are redone when the configured
// limit exceeds the recorded one.  Returns the full record set (old + new).
std::vector<ZassenhausRecord> resume(const ScanConfig& cfg);

// Parses a JSONL record file; throws CorruptCache with the offending line.
std::vector<ZassenhausRecord> load_records(const std::string& path);

// Re-derives the classification from the stored witnesses alone.
tower::Classification classify_record(const ZassenhausRecord& r);

// Grouped (p, D) lists per classification plus per-p rank-2 counts.
std::string report(const std::vector<ZassenhausRecord>& records);

const char* verdict_name(tower::Verdict v);

}  // namespace cft::scan
