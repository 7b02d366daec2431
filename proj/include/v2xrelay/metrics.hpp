#pragma once

#include <cstdint>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "v2xrelay/result.hpp"

namespace v2xrelay::metrics {

enum class Hop : uint8_t { kDsrc = 0, kUdp = 1, kWs = 2, kCmpTcp = 3 };

std::string_view hop_name(Hop h);
std::optional<Hop> hop_from_name(std::string_view name);

// One timing sample for one message on one hop. recv_ts_ms absent = dropped.
struct HopRecord {
  Hop hop = Hop::kDsrc;
  uint64_t msg_id = 0;
  int64_t send_ts_ms = 0;
  std::optional<int64_t> recv_ts_ms;

  std::optional<int64_t> latency_ms() const {
    if (!recv_ts_ms) return std::nullopt;
    return *recv_ts_ms - send_ts_ms;
  }
};

struct HopSummary {
  Hop hop = Hop::kDsrc;
  uint64_t count_sent = 0;
  uint64_t count_received = 0;
  double drop_pct = 0.0;
  // Statistics are null when no packet was received on the hop.
  std::optional<double> mean_ms;
  std::optional<double> median_ms;
  std::optional<double> p95_ms;
  std::optional<int64_t> min_ms;
  std::optional<int64_t> max_ms;
};

struct LatencyReport {
  std::vector<HopSummary> hops;  // ordered by hop id

  const HopSummary* find(Hop h) const;
};

// Append-only sample sink; (hop, msg_id) pairs are unique. Safe to call from
// multiple producer threads; read records() only after all producers stop.
class Recorder {
 public:
  Result<void> record(Hop hop, uint64_t msg_id, int64_t send_ts_ms,
                      std::optional<int64_t> recv_ts_ms);
  std::vector<HopRecord> records() const;
  size_t size() const;

 private:
  mutable std::mutex mu_;
  std::vector<HopRecord> records_;
  std::set<std::pair<uint8_t, uint64_t>> seen_;
};

// Per-hop statistics over the given records. With a filter, the report holds
// exactly one entry for that hop (zeroed when the hop has no records);
// without, one entry per hop that appears in the input.
LatencyReport summarize(std::span<const HopRecord> records,
                        std::optional<Hop> filter = std::nullopt);

// Raw CSV: hop,msg_id,send_ts_ms,recv_ts_ms,latency_ms with rows sorted by
// (send_ts, hop, msg_id). Dropped packets leave recv/latency empty.
std::string records_csv(std::span<const HopRecord> records);
Result<void> export_records_csv(std::span<const HopRecord> records,
                                const std::string& path);

// Summary CSV: one row per hop.
std::string report_csv(const LatencyReport& report);
Result<void> export_report_csv(const LatencyReport& report,
                               const std::string& path);

std::string report_json(const LatencyReport& report);
Result<void> export_report_json(const LatencyReport& report,
                                const std::string& path);

// Inverse of export_records_csv. Errors carry the 1-based offending line.
Result<std::vector<HopRecord>> parse_records_csv(const std::string& path);

}  // namespace v2xrelay::metrics
