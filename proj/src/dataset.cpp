#include "sohkan/dataset.hpp"

#include "sohkan/log.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace sohkan {

namespace {

constexpr const char* kCsvHeader = "cycle,t_s,temp_c,current_a,voltage_v,ambient_c";

void append_double(std::string& out, double value) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), value);
    out.append(buf, res.ptr);
}

double parse_double(std::string_view field, std::size_t line_no, const char* column) {
    double value = 0.0;
    auto res = std::from_chars(field.data(), field.data() + field.size(), value);
    if (res.ec != std::errc{} || res.ptr != field.data() + field.size()) {
        throw std::runtime_error("csv line " + std::to_string(line_no) + ": bad " + column +
                                 " value '" + std::string(field) + "'");
    }
    return value;
}

long parse_int(std::string_view field, std::size_t line_no, const char* column) {
    long value = 0;
    auto res = std::from_chars(field.data(), field.data() + field.size(), value);
    if (res.ec != std::errc{} || res.ptr != field.data() + field.size()) {
        throw std::runtime_error("csv line " + std::to_string(line_no) + ": bad " + column +
                                 " value '" + std::string(field) + "'");
    }
    return value;
}

}  // namespace

double CycleRecord::tau_s() const {
    if (t_s.size() < 2) throw std::runtime_error("cycle record needs at least two samples");
    return t_s[1] - t_s[0];
}

void CycleRecord::validate() const {
    const std::size_t n = t_s.size();
    if (n < 2) {
        throw std::invalid_argument("cycle " + std::to_string(cycle) +
                                    " has fewer than two samples");
    }
    if (temp_c.size() != n || current_a.size() != n || voltage_v.size() != n) {
        throw std::invalid_argument("cycle " + std::to_string(cycle) +
                                    " has mismatched channel lengths");
    }
    const double tau = t_s[1] - t_s[0];
    if (!(tau > 0.0)) {
        throw std::invalid_argument("cycle " + std::to_string(cycle) +
                                    " timestamps are not increasing");
    }
    const double tol = 1e-9 * std::max(1.0, tau);
    for (std::size_t i = 1; i < n; ++i) {
        const double dt = t_s[i] - t_s[i - 1];
        if (std::abs(dt - tau) > tol) {
            throw std::invalid_argument("cycle " + std::to_string(cycle) +
                                        " sample spacing is not uniform near index " +
                                        std::to_string(i));
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(temp_c[i]) || !std::isfinite(current_a[i]) ||
            !std::isfinite(voltage_v[i])) {
            throw std::invalid_argument("cycle " + std::to_string(cycle) +
                                        " contains a non-finite sample at index " +
                                        std::to_string(i));
        }
    }
    if (!std::isfinite(t_ambient_c)) {
        throw std::invalid_argument("cycle " + std::to_string(cycle) + " ambient is non-finite");
    }
}

int CycleDataset::last_cycle() const {
    if (cycles.empty()) throw std::runtime_error("dataset is empty");
    return cycles.back().cycle;
}

void CycleDataset::validate() const {
    if (cycles.empty()) throw std::invalid_argument("dataset has no cycles");
    for (std::size_t i = 0; i < cycles.size(); ++i) {
        if (cycles[i].cycle != static_cast<int>(i)) {
            throw std::invalid_argument("cycle indices must be contiguous from 0, found " +
                                        std::to_string(cycles[i].cycle) + " at position " +
                                        std::to_string(i));
        }
        cycles[i].validate();
    }
    const double ambient = cycles.front().t_ambient_c;
    const double tau = cycles.front().tau_s();
    for (const CycleRecord& record : cycles) {
        if (std::abs(record.t_ambient_c - ambient) > 1e-6) {
            throw std::invalid_argument("ambient temperature varies across cycles; constant "
                                        "ambient datasets are the supported scope");
        }
        if (std::abs(record.tau_s() - tau) > 1e-9 * std::max(1.0, tau)) {
            throw std::invalid_argument("sample period varies across cycles");
        }
    }
}

void save_dataset_csv(const CycleDataset& dataset, const std::string& path) {
    dataset.validate();
    std::string out;
    out.reserve(dataset.size() * 2048);
    out += kCsvHeader;
    out += '\n';
    for (const CycleRecord& record : dataset.cycles) {
        for (std::size_t i = 0; i < record.size(); ++i) {
            out += std::to_string(record.cycle);
            out += ',';
            append_double(out, record.t_s[i]);
            out += ',';
            append_double(out, record.temp_c[i]);
            out += ',';
            append_double(out, record.current_a[i]);
            out += ',';
            append_double(out, record.voltage_v[i]);
            out += ',';
            append_double(out, record.t_ambient_c);
            out += '\n';
        }
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open '" + path + "' for writing");
    file.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!file) throw std::runtime_error("write failed for '" + path + "'");
}

CycleDataset load_dataset_csv(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open dataset '" + path + "'");
    std::string content((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());

    CycleDataset dataset;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    bool header_seen = false;
    CycleRecord* current = nullptr;

    while (pos < content.size()) {
        std::size_t eol = content.find('\n', pos);
        if (eol == std::string::npos) eol = content.size();
        std::string_view line(content.data() + pos, eol - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        pos = eol + 1;
        ++line_no;

        if (line.empty()) continue;
        if (!header_seen) {
            if (line != kCsvHeader) {
                throw std::runtime_error("dataset '" + path + "' has unexpected header '" +
                                         std::string(line) + "', expected '" + kCsvHeader + "'");
            }
            header_seen = true;
            continue;
        }

        std::string_view fields[6];
        std::size_t start = 0;
        int count = 0;
        for (std::size_t i = 0; i <= line.size(); ++i) {
            if (i == line.size() || line[i] == ',') {
                if (count >= 6) {
                    throw std::runtime_error("csv line " + std::to_string(line_no) +
                                             ": too many columns");
                }
                fields[count++] = line.substr(start, i - start);
                start = i + 1;
            }
        }
        if (count != 6) {
            throw std::runtime_error("csv line " + std::to_string(line_no) + ": expected 6 columns, got " +
                                     std::to_string(count));
        }

        const long cycle = parse_int(fields[0], line_no, "cycle");
        const double t = parse_double(fields[1], line_no, "t_s");
        const double temp = parse_double(fields[2], line_no, "temp_c");
        const double current_a = parse_double(fields[3], line_no, "current_a");
        const double voltage = parse_double(fields[4], line_no, "voltage_v");
        const double ambient = parse_double(fields[5], line_no, "ambient_c");

        if (current == nullptr || current->cycle != cycle) {
            if (current != nullptr && cycle < current->cycle) {
                throw std::runtime_error("csv line " + std::to_string(line_no) +
                                         ": cycle " + std::to_string(cycle) +
                                         " appears after cycle " + std::to_string(current->cycle) +
                                         "; rows must be grouped by ascending cycle");
            }
            dataset.cycles.emplace_back();
            current = &dataset.cycles.back();
            current->cycle = static_cast<int>(cycle);
            current->t_ambient_c = ambient;
        } else if (std::abs(ambient - current->t_ambient_c) > 1e-9) {
            throw std::runtime_error("csv line " + std::to_string(line_no) +
                                     ": ambient changes within cycle " + std::to_string(cycle));
        }
        current->t_s.push_back(t);
        current->temp_c.push_back(temp);
        current->current_a.push_back(current_a);
        current->voltage_v.push_back(voltage);
    }

    if (dataset.cycles.empty()) {
        throw std::runtime_error("dataset '" + path + "' contains no data rows");
    }
    dataset.validate();
    return dataset;
}

IndexRange extract_cc_phase(const CycleRecord& record, double cc_current, double tol,
                            std::size_t min_samples) {
    record.validate();
    if (tol < 0.0) throw std::invalid_argument("cc tolerance must be >= 0");

    double target = cc_current;
    if (target <= 0.0) {
        target = *std::max_element(record.current_a.begin(), record.current_a.end());
        if (target <= 0.0) {
            throw std::runtime_error("cycle " + std::to_string(record.cycle) +
                                     " has no positive current, cannot locate CC phase");
        }
    }

    IndexRange best;
    std::size_t run_begin = 0;
    bool in_run = false;
    const std::size_t n = record.size();
    for (std::size_t i = 0; i <= n; ++i) {
        const bool match = i < n && std::abs(record.current_a[i] - target) <= tol;
        if (match && !in_run) {
            run_begin = i;
            in_run = true;
        } else if (!match && in_run) {
            if (i - run_begin > best.length()) best = IndexRange{run_begin, i};
            in_run = false;
        }
    }

    if (best.length() < min_samples) {
        throw std::runtime_error("cycle " + std::to_string(record.cycle) +
                                 ": CC phase too short for horizon (" +
                                 std::to_string(best.length()) + " samples, need " +
                                 std::to_string(min_samples) + ")");
    }
    return best;
}

void SplitOffsets::validate() const {
    if (train < 0 || validation < 0 || test < 0) {
        throw std::invalid_argument("split offsets must be >= 0");
    }
    if (train == validation || train == test || validation == test) {
        throw std::invalid_argument("split offsets collide; train/validation/test must be distinct");
    }
}

int SplitOffsets::max_offset() const { return std::max(train, std::max(validation, test)); }

SplitOffsets default_split_offsets(int horizon_n) {
    if (horizon_n < 1) throw std::invalid_argument("horizon must be >= 1");
    SplitOffsets offsets;
    offsets.train = horizon_n;
    offsets.validation = horizon_n + std::max(1, horizon_n / 20);
    offsets.test = horizon_n + std::max(2, horizon_n / 10);
    offsets.validate();
    return offsets;
}

void PairBuildConfig::validate() const {
    if (horizon_n < 1) throw std::invalid_argument("horizon must be >= 1");
    if (cc_tol < 0.0) throw std::invalid_argument("cc tolerance must be >= 0");
    offsets.validate();
}

namespace {

std::size_t pair_min_samples(const PairBuildConfig& config) {
    return static_cast<std::size_t>(config.offsets.max_offset()) +
           static_cast<std::size_t>(config.horizon_n) + 1;
}

}  // namespace

NormalizationParams compute_normalization(const CycleDataset& dataset,
                                          const PairBuildConfig& config) {
    dataset.validate();
    config.validate();

    double t_min = std::numeric_limits<double>::infinity();
    double t_max = -std::numeric_limits<double>::infinity();
    for (const CycleRecord& record : dataset.cycles) {
        const IndexRange cc =
            extract_cc_phase(record, config.cc_current, config.cc_tol, pair_min_samples(config));
        const std::size_t in = cc.begin + static_cast<std::size_t>(config.offsets.train);
        const std::size_t target = in + static_cast<std::size_t>(config.horizon_n);
        t_min = std::min(t_min, std::min(record.temp_c[in], record.temp_c[target]));
        t_max = std::max(t_max, std::max(record.temp_c[in], record.temp_c[target]));
    }

    NormalizationParams norm{t_min, t_max};
    if (!(t_max > t_min)) {
        throw std::runtime_error("training temperatures are constant, normalization is degenerate");
    }
    norm.validate();
    return norm;
}

SplitPairs build_pairs(const CycleDataset& dataset, const NormalizationParams& norm,
                       const PairBuildConfig& config) {
    dataset.validate();
    config.validate();
    norm.validate();

    const int last = dataset.last_cycle();
    SplitPairs pairs;
    pairs.train.reserve(dataset.size());
    pairs.validation.reserve(dataset.size());
    pairs.test.reserve(dataset.size());

    for (const CycleRecord& record : dataset.cycles) {
        const IndexRange cc =
            extract_cc_phase(record, config.cc_current, config.cc_tol, pair_min_samples(config));
        const double k_bar = last > 0 ? static_cast<double>(record.cycle) / last : 0.0;

        const auto make_pair = [&](int offset) {
            const std::size_t in = cc.begin + static_cast<std::size_t>(offset);
            const std::size_t target = in + static_cast<std::size_t>(config.horizon_n);
            return HorizonPair{norm.normalize(record.temp_c[in]), k_bar,
                               norm.normalize(record.temp_c[target]), record.cycle};
        };
        pairs.train.push_back(make_pair(config.offsets.train));
        pairs.validation.push_back(make_pair(config.offsets.validation));
        pairs.test.push_back(make_pair(config.offsets.test));
    }
    return pairs;
}

void save_pairs_csv(const SplitPairs& pairs, const std::string& path) {
    std::string out = "cycle,k_bar,t_bar_in,t_bar_target,split\n";
    const auto dump = [&out](const std::vector<HorizonPair>& list, const char* split) {
        for (const HorizonPair& pair : list) {
            out += std::to_string(pair.cycle);
            out += ',';
            append_double(out, pair.k_bar);
            out += ',';
            append_double(out, pair.t_bar_in);
            out += ',';
            append_double(out, pair.t_bar_target);
            out += ',';
            out += split;
            out += '\n';
        }
    };
    dump(pairs.train, "train");
    dump(pairs.validation, "validation");
    dump(pairs.test, "test");

    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open '" + path + "' for writing");
    file.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!file) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace sohkan
