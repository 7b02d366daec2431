#include "v2xrelay/metrics.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace v2xrelay::metrics {
namespace {

constexpr std::string_view kRecordsHeader =
    "hop,msg_id,send_ts_ms,recv_ts_ms,latency_ms";
constexpr std::string_view kReportHeader =
    "hop,count_sent,count_received,drop_pct,mean_ms,median_ms,p95_ms,min_ms,"
    "max_ms";

std::string fmt_stat(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

std::string fmt_opt(const std::optional<double>& v) {
  return v ? fmt_stat(*v) : std::string();
}

std::string fmt_opt(const std::optional<int64_t>& v) {
  return v ? std::to_string(*v) : std::string();
}

Result<int64_t> parse_i64(std::string_view s) {
  int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    return make_error(Errc::kParseError, "bad integer");
  }
  return v;
}

Result<uint64_t> parse_u64(std::string_view s) {
  uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    return make_error(Errc::kParseError, "bad integer");
  }
  return v;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  size_t start = 0;
  while (true) {
    size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

HopSummary summarize_hop(Hop hop, std::span<const HopRecord> records) {
  HopSummary s;
  s.hop = hop;
  std::vector<int64_t> latencies;
  for (const HopRecord& r : records) {
    if (r.hop != hop) continue;
    ++s.count_sent;
    if (auto lat = r.latency_ms()) {
      ++s.count_received;
      latencies.push_back(*lat);
    }
  }
  s.drop_pct = s.count_sent == 0
                   ? 0.0
                   : 100.0 * static_cast<double>(s.count_sent - s.count_received) /
                         static_cast<double>(s.count_sent);
  if (latencies.empty()) {
    return s;
  }
  std::sort(latencies.begin(), latencies.end());
  const size_t n = latencies.size();
  double sum = 0.0;
  for (int64_t v : latencies) sum += static_cast<double>(v);
  s.mean_ms = sum / static_cast<double>(n);
  s.median_ms = (n % 2 == 1)
                    ? static_cast<double>(latencies[n / 2])
                    : (static_cast<double>(latencies[n / 2 - 1]) +
                       static_cast<double>(latencies[n / 2])) /
                          2.0;
  // Nearest-rank percentile.
  const size_t rank =
      static_cast<size_t>(std::ceil(0.95 * static_cast<double>(n)));
  s.p95_ms = static_cast<double>(latencies[std::max<size_t>(rank, 1) - 1]);
  s.min_ms = latencies.front();
  s.max_ms = latencies.back();
  return s;
}

Result<void> write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    return make_error(Errc::kIoError, path);
  }
  out << content;
  out.flush();
  if (!out) {
    return make_error(Errc::kIoError, path);
  }
  return {};
}

}  // namespace

std::string_view hop_name(Hop h) {
  switch (h) {
    case Hop::kDsrc: return "DSRC";
    case Hop::kUdp: return "UDP";
    case Hop::kWs: return "WS";
    case Hop::kCmpTcp: return "CMP_TCP";
  }
  return "?";
}

std::optional<Hop> hop_from_name(std::string_view name) {
  if (name == "DSRC") return Hop::kDsrc;
  if (name == "UDP") return Hop::kUdp;
  if (name == "WS") return Hop::kWs;
  if (name == "CMP_TCP") return Hop::kCmpTcp;
  return std::nullopt;
}

const HopSummary* LatencyReport::find(Hop h) const {
  for (const HopSummary& s : hops) {
    if (s.hop == h) return &s;
  }
  return nullptr;
}

Result<void> Recorder::record(Hop hop, uint64_t msg_id, int64_t send_ts_ms,
                              std::optional<int64_t> recv_ts_ms) {
  if (send_ts_ms < 0) {
    return make_error(Errc::kCausalityViolation, "send_ts < 0");
  }
  if (recv_ts_ms && *recv_ts_ms <= send_ts_ms) {
    return make_error(Errc::kCausalityViolation, "recv <= send");
  }
  std::lock_guard<std::mutex> lock(mu_);
  auto key = std::make_pair(static_cast<uint8_t>(hop), msg_id);
  if (!seen_.insert(key).second) {
    return make_error(Errc::kDuplicateRecord,
                      std::string(hop_name(hop)) + "/" + std::to_string(msg_id));
  }
  records_.push_back(HopRecord{hop, msg_id, send_ts_ms, recv_ts_ms});
  return {};
}

std::vector<HopRecord> Recorder::records() const {
  std::lock_guard<std::mutex> lock(mu_);
  return records_;
}

size_t Recorder::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return records_.size();
}

LatencyReport summarize(std::span<const HopRecord> records,
                        std::optional<Hop> filter) {
  LatencyReport report;
  constexpr std::array<Hop, 4> kAll = {Hop::kDsrc, Hop::kUdp, Hop::kWs,
                                       Hop::kCmpTcp};
  if (filter) {
    report.hops.push_back(summarize_hop(*filter, records));
    return report;
  }
  for (Hop h : kAll) {
    HopSummary s = summarize_hop(h, records);
    if (s.count_sent > 0) {
      report.hops.push_back(s);
    }
  }
  return report;
}

std::string records_csv(std::span<const HopRecord> records) {
  std::vector<HopRecord> sorted(records.begin(), records.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const HopRecord& a, const HopRecord& b) {
              if (a.send_ts_ms != b.send_ts_ms) return a.send_ts_ms < b.send_ts_ms;
              if (a.hop != b.hop) return a.hop < b.hop;
              return a.msg_id < b.msg_id;
            });
  std::string out(kRecordsHeader);
  out.push_back('\n');
  for (const HopRecord& r : sorted) {
    out += hop_name(r.hop);
    out.push_back(',');
    out += std::to_string(r.msg_id);
    out.push_back(',');
    out += std::to_string(r.send_ts_ms);
    out.push_back(',');
    out += fmt_opt(r.recv_ts_ms);
    out.push_back(',');
    out += fmt_opt(r.latency_ms());
    out.push_back('\n');
  }
  return out;
}

Result<void> export_records_csv(std::span<const HopRecord> records,
                                const std::string& path) {
  return write_file(path, records_csv(records));
}

std::string report_csv(const LatencyReport& report) {
  std::string out(kReportHeader);
  out.push_back('\n');
  for (const HopSummary& s : report.hops) {
    out += hop_name(s.hop);
    out.push_back(',');
    out += std::to_string(s.count_sent);
    out.push_back(',');
    out += std::to_string(s.count_received);
    out.push_back(',');
    out += fmt_stat(s.drop_pct);
    out.push_back(',');
    out += fmt_opt(s.mean_ms);
    out.push_back(',');
    out += fmt_opt(s.median_ms);
    out.push_back(',');
    out += fmt_opt(s.p95_ms);
    out.push_back(',');
    out += fmt_opt(s.min_ms);
    out.push_back(',');
    out += fmt_opt(s.max_ms);
    out.push_back('\n');
  }
  return out;
}

Result<void> export_report_csv(const LatencyReport& report,
                               const std::string& path) {
  return write_file(path, report_csv(report));
}

std::string report_json(const LatencyReport& report) {
  nlohmann::ordered_json j;
  j["hops"] = nlohmann::ordered_json::array();
  for (const HopSummary& s : report.hops) {
    nlohmann::ordered_json h;
    h["hop"] = std::string(hop_name(s.hop));
    h["count_sent"] = s.count_sent;
    h["count_received"] = s.count_received;
    h["drop_pct"] = s.drop_pct;
    h["mean_ms"] = s.mean_ms ? nlohmann::ordered_json(*s.mean_ms)
                             : nlohmann::ordered_json(nullptr);
    h["median_ms"] = s.median_ms ? nlohmann::ordered_json(*s.median_ms)
                                 : nlohmann::ordered_json(nullptr);
    h["p95_ms"] = s.p95_ms ? nlohmann::ordered_json(*s.p95_ms)
                           : nlohmann::ordered_json(nullptr);
    h["min_ms"] = s.min_ms ? nlohmann::ordered_json(*s.min_ms)
                           : nlohmann::ordered_json(nullptr);
    h["max_ms"] = s.max_ms ? nlohmann::ordered_json(*s.max_ms)
                           : nlohmann::ordered_json(nullptr);
    j["hops"].push_back(h);
  }
  return j.dump(2) + "\n";
}

Result<void> export_report_json(const LatencyReport& report,
                                const std::string& path) {
  return write_file(path, report_json(report));
}

Result<std::vector<HopRecord>> parse_records_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return make_error(Errc::kIoError, path);
  }
  std::vector<HopRecord> out;
  std::string line;
  size_t lineno = 0;
  bool saw_header = false;
  auto fail = [&](const std::string& why) {
    return make_error(Errc::kParseError,
                      "line " + std::to_string(lineno) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line == kRecordsHeader) {
      // Repeated headers appear when two exports are concatenated.
      saw_header = true;
      continue;
    }
    if (!saw_header) {
      return fail("missing header");
    }
    auto fields = split_csv(line);
    if (fields.size() != 5) {
      return fail("expected 5 fields");
    }
    auto hop = hop_from_name(fields[0]);
    if (!hop) {
      return fail("unknown hop");
    }
    auto msg_id = parse_u64(fields[1]);
    if (!msg_id) return fail("bad msg_id");
    auto send = parse_i64(fields[2]);
    if (!send) return fail("bad send_ts_ms");
    std::optional<int64_t> recv;
    if (!fields[3].empty()) {
      auto r = parse_i64(fields[3]);
      if (!r) return fail("bad recv_ts_ms");
      recv = r.value();
      if (*recv <= send.value()) return fail("recv <= send");
    }
    // latency column is derived; verify consistency when present.
    if (!fields[4].empty()) {
      auto lat = parse_i64(fields[4]);
      if (!lat || !recv || *recv - send.value() != lat.value()) {
        return fail("latency mismatch");
      }
    } else if (recv) {
      return fail("latency missing");
    }
    out.push_back(HopRecord{*hop, msg_id.value(), send.value(), recv});
  }
  if (!saw_header) {
    lineno = 1;
    return fail("missing header");
  }
  return out;
}

}  // namespace v2xrelay::metrics
