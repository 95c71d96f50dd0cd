#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "slicesim/common.hpp"

namespace slicesim::trace {

/// One decoded control-channel line: who was scheduled when, with which MCS,
/// and how many resource blocks.
struct RawRecord {
  double timestamp = 0.0;   ///< unix seconds, fractional allowed
  std::uint32_t rnti = 0;   ///< temporary UE identifier
  int direction = 1;        ///< 0 = uplink, 1 = downlink
  int mcs_idx = 0;          ///< 0..31
  int nof_prb = 0;
};

/// Quantized slice state: connected-user count and mean MCS index.
struct SliceState {
  int users = 0;
  int avg_mcs = 0;
};

/// Per-MCS deliverable rate map. `kbps_per_prb` holds the base rate before
/// the MIMO multiplier; the effective rate is base * mimo_factor.
struct DemandMapTable {
  std::map<int, double> kbps_per_prb;
  double mimo_factor = 1.0;

  double rate(int mcs) const;     ///< effective kbps per PRB; throws McsOutOfTable
  bool covers(int mcs) const { return kbps_per_prb.count(mcs) > 0; }
  int min_mcs() const { return kbps_per_prb.begin()->first; }
  int max_mcs() const { return kbps_per_prb.rbegin()->first; }
};

/// Built-in approximation of LTE downlink throughput per PRB: 15 spectral
/// efficiency anchors spread over MCS 0..28 and linearly interpolated, at
/// 168 resource elements per PRB-ms, with a 2x2 MIMO multiplier.
DemandMapTable default_demand_table();

/// Load a `mcs_idx,kbps_per_prb` CSV. Values are taken as effective rates
/// (mimo_factor 1). Rates must be positive and nondecreasing in MCS.
DemandMapTable load_demand_table_csv(const std::string& path);

/// Quantization and slotting constants for one slice.
struct AggregationConfig {
  int slot_seconds = 10;     ///< D
  int users_step = 1;        ///< U_i, floor quantization
  int mcs_step = 1;          ///< M_i, floor quantization
  long long demand_step = 1; ///< W_i, ceiling quantization
  double target_kbps = 1000; ///< R_i
};

/// Canonical per-slot sample of one slice.
struct SlotSample {
  int users = 0;        ///< quantized user count
  int mcs = 0;          ///< quantized mean MCS
  long long demand = 0; ///< PRBs
};
using SlotSeries = std::vector<SlotSample>;

/// Sliding-window distinct-RNTI count over downlink records. Element k of
/// the result is the count for second floor(min_ts)+k, counting records in
/// [t - window_seconds, t]. Empty input yields an empty vector.
struct UserCounts {
  std::int64_t first_second = 0;
  std::vector<int> counts;
};
UserCounts count_connected_users(const std::vector<RawRecord>& records, int window_seconds);

/// Mean of mcs_idx over downlink records with floor(timestamp) == second.
/// Throws NoSamples when no such record exists; callers hold the previous
/// second's value.
double average_mcs(const std::vector<RawRecord>& records, std::int64_t second);

/// PRBs needed to give every connected user `target_kbps`:
/// ceil(target / rate(mcs)) per user, times the user count. This is the
/// deterministic demand map mu.
long long demand_map(const SliceState& state, double target_kbps, const DemandMapTable& table);

/// Per-second intermediate state before slot aggregation.
struct SecondState {
  std::int64_t second = 0;
  int users = 0;
  double avg_mcs = 0.0;
};

/// Build the per-second (users, avg_mcs) series from raw records. Missing
/// seconds hold the last value; a leading gap is backfilled from the first
/// observed average. `users_override` (second -> count) replaces the
/// sliding-window count when provided.
std::vector<SecondState> per_second_series(const std::vector<RawRecord>& records,
                                           int user_window_seconds,
                                           const std::map<std::int64_t, int>* users_override);

/// Slot aggregation: sample every cfg.slot_seconds entries, floor-quantize
/// users and MCS, recompute demand through the demand map and round it up to
/// a multiple of cfg.demand_step. MCS outside the table is clamped to the
/// covered range before mapping.
SlotSeries aggregate(const std::vector<SecondState>& series, const AggregationConfig& cfg,
                     const DemandMapTable& table);

/// Recompute one slot's demand from an already-quantized state (the same mu
/// + ceiling step used by aggregate). Exposed for series regeneration.
long long quantized_demand(int users_q, int mcs_q, const AggregationConfig& cfg,
                           const DemandMapTable& table);

// --- CSV I/O -------------------------------------------------------------

struct RawCsv {
  std::vector<RawRecord> records;
  std::vector<std::size_t> dropped_rows;  ///< 1-based rows dropped for nof_prb > 110
};

/// Read a `timestamp,sfn,subframe,rnti,direction,mcs_idx,nof_prb` CSV.
/// Malformed rows raise Config errors naming the row; rows with
/// nof_prb > 110 (decode errors upstream) are dropped and reported.
RawCsv read_raw_csv(const std::string& path);

/// Read an optional `timestamp,users` per-second count CSV.
std::map<std::int64_t, int> read_users_csv(const std::string& path);

void write_slot_series_csv(const std::string& path, const SlotSeries& series);
SlotSeries read_slot_series_csv(const std::string& path);

}  // namespace slicesim::trace
