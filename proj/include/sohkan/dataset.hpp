#pragma once

#include "sohkan/types.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace sohkan {

/// Telemetry for a single charge cycle, sampled on a uniform time grid.
struct CycleRecord {
    int cycle = 0;
    double t_ambient_c = 0.0;
    std::vector<double> t_s;
    std::vector<double> temp_c;
    std::vector<double> current_a;
    std::vector<double> voltage_v;

    [[nodiscard]] std::size_t size() const { return t_s.size(); }
    [[nodiscard]] double tau_s() const;
    void validate() const;
};

/// A full life test: one record per cycle, indices contiguous from zero.
struct CycleDataset {
    std::vector<CycleRecord> cycles;

    [[nodiscard]] std::size_t size() const { return cycles.size(); }
    /// Index of the final cycle (E). k_bar = cycle / E.
    [[nodiscard]] int last_cycle() const;
    void validate() const;
};

/// Half-open sample range [begin, end) within one cycle record.
struct IndexRange {
    std::size_t begin = 0;
    std::size_t end = 0;

    [[nodiscard]] std::size_t length() const { return end - begin; }
};

// ---------------------------------------------------------------------------
// CSV persistence. Schema: cycle,t_s,temp_c,current_a,voltage_v,ambient_c
// ---------------------------------------------------------------------------

void save_dataset_csv(const CycleDataset& dataset, const std::string& path);

[[nodiscard]] CycleDataset load_dataset_csv(const std::string& path);

// ---------------------------------------------------------------------------
// Pair construction
// ---------------------------------------------------------------------------

/// Finds the constant-current phase of one cycle: the longest contiguous run
/// of samples with |I - cc_current| <= tol. cc_current <= 0 selects the
/// cycle's own maximum current. Throws when the longest run has fewer than
/// min_samples entries.
[[nodiscard]] IndexRange extract_cc_phase(const CycleRecord& record, double cc_current,
                                          double tol, std::size_t min_samples);

/// Sample offsets from the start of the CC phase, one per split. Offsets must
/// be pairwise distinct so the splits stay disjoint.
struct SplitOffsets {
    int train = 100;
    int validation = 105;
    int test = 110;

    void validate() const;
    [[nodiscard]] int max_offset() const;
};

/// Default split offsets for a given horizon: the training sample sits one
/// horizon into the CC phase where cycle-to-cycle temperature spread is wide,
/// and validation/test trail it by small disjoint gaps so their inputs stay
/// inside the temperature range the training split covers.
[[nodiscard]] SplitOffsets default_split_offsets(int horizon_n);

struct PairBuildConfig {
    double cc_current = -1.0;  // <= 0: auto-detect per cycle
    double cc_tol = 0.25;
    int horizon_n = 100;
    SplitOffsets offsets;

    void validate() const;
};

/// Min-max constants over the temperatures the training split touches, which
/// is the union of its input and target samples across all cycles.
[[nodiscard]] NormalizationParams compute_normalization(const CycleDataset& dataset,
                                                        const PairBuildConfig& config);

struct SplitPairs {
    std::vector<HorizonPair> train;
    std::vector<HorizonPair> validation;
    std::vector<HorizonPair> test;
};

/// Builds one pair per cycle per split. Temperatures are normalized with the
/// supplied constants; test-split values may fall outside [0, 1] and are kept
/// as is.
[[nodiscard]] SplitPairs build_pairs(const CycleDataset& dataset, const NormalizationParams& norm,
                                     const PairBuildConfig& config);

/// Debug export, schema: cycle,k_bar,t_bar_in,t_bar_target,split
void save_pairs_csv(const SplitPairs& pairs, const std::string& path);

}  // namespace sohkan
