#include "lexmatcher/stats.hpp"

#include "lexmatcher/error.hpp"
#include "lexmatcher/parallel.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <unordered_map>

namespace lexmatcher {

FrequencyProfile frequency_profile(const std::vector<std::string>& sentences,
                                   const Tokenizer& tokenizer, int threads) {
    threads = resolve_threads(threads);
    std::vector<std::unordered_map<std::string, std::uint64_t>> partial(
        static_cast<std::size_t>(threads));
    std::atomic<int> slot{0};
    parallel_chunks(sentences.size(), threads, [&](std::size_t begin, std::size_t end) {
        auto& counts = partial[static_cast<std::size_t>(slot.fetch_add(1))];
        for (std::size_t i = begin; i < end; ++i) {
            for (std::string& token : tokenizer.tokenize(sentences[i])) {
                ++counts[std::move(token)];
            }
        }
    });

    std::unordered_map<std::string, std::uint64_t> merged;
    for (auto& counts : partial) {
        for (auto& [token, count] : counts) merged[token] += count;
    }

    FrequencyProfile profile;
    profile.unique_types = merged.size();
    profile.table.reserve(merged.size());
    for (auto& [token, count] : merged) {
        profile.table.push_back({0, token, count});
        profile.total_tokens += count;
    }
    std::sort(profile.table.begin(), profile.table.end(),
              [](const FrequencyEntry& a, const FrequencyEntry& b) {
                  if (a.count != b.count) return a.count > b.count;
                  return a.token < b.token;
              });
    for (std::size_t i = 0; i < profile.table.size(); ++i) profile.table[i].rank = i + 1;
    return profile;
}

namespace {

double head_mass(const FrequencyProfile& profile, std::size_t head = 100) {
    if (profile.total_tokens == 0) return 0.0;
    std::uint64_t head_tokens = 0;
    for (std::size_t i = 0; i < profile.table.size() && i < head; ++i) {
        head_tokens += profile.table[i].count;
    }
    return static_cast<double>(head_tokens) / static_cast<double>(profile.total_tokens);
}

} // namespace

ProfileComparison compare_profiles(const FrequencyProfile& a, const FrequencyProfile& b) {
    return {a.unique_types, b.unique_types, a.total_tokens, b.total_tokens,
            head_mass(a), head_mass(b)};
}

std::string ProfileComparison::to_json() const {
    nlohmann::ordered_json j;
    j["unique_types_a"] = unique_types_a;
    j["unique_types_b"] = unique_types_b;
    j["total_tokens_a"] = total_tokens_a;
    j["total_tokens_b"] = total_tokens_b;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", head_mass_a);
    j["head_mass_a"] = buf;
    std::snprintf(buf, sizeof(buf), "%.6f", head_mass_b);
    j["head_mass_b"] = buf;
    return j.dump(2);
}

namespace {

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

} // namespace

void write_profile_csv(const FrequencyProfile& profile, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << "rank,token,count\n";
    for (const FrequencyEntry& entry : profile.table) {
        out << entry.rank << ',' << csv_escape(entry.token) << ',' << entry.count << '\n';
    }
    if (!out) throw IoError("write failure on " + path.string());
}

void write_rank_logfreq_csv(const FrequencyProfile& a, const FrequencyProfile& b,
                            const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << "rank,log10_count_a,log10_count_b\n";
    const std::size_t rows = std::max(a.table.size(), b.table.size());
    char buf[32];
    for (std::size_t i = 0; i < rows; ++i) {
        out << (i + 1) << ',';
        if (i < a.table.size()) {
            std::snprintf(buf, sizeof(buf), "%.6f", std::log10(static_cast<double>(a.table[i].count)));
            out << buf;
        }
        out << ',';
        if (i < b.table.size()) {
            std::snprintf(buf, sizeof(buf), "%.6f", std::log10(static_cast<double>(b.table[i].count)));
            out << buf;
        }
        out << '\n';
    }
    if (!out) throw IoError("write failure on " + path.string());
}

std::vector<SubsetSizeRow> subset_size_table(const Corpus& corpus, const Lexicon& lexicon,
                                             const std::vector<int>& ks, const PairResources& res,
                                             const RetrieveOptions& options) {
    std::vector<SubsetSizeRow> rows;
    rows.reserve(ks.size());
    for (int k : ks) {
        RetrieveResult result = retrieve(corpus, lexicon, k, res, options);
        rows.push_back({k, result.subset.size()});
    }
    return rows;
}

void write_subset_sizes_csv(const std::vector<SubsetSizeRow>& rows, std::uint64_t raw_size,
                            const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << "k,subset_size\n";
    out << "raw," << raw_size << '\n';
    for (const SubsetSizeRow& row : rows) out << row.k << ',' << row.subset_size << '\n';
    if (!out) throw IoError("write failure on " + path.string());
}

} // namespace lexmatcher
