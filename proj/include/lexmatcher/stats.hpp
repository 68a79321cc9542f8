#pragma once

#include "lexmatcher/corpus.hpp"
#include "lexmatcher/lexicon.hpp"
#include "lexmatcher/matcher.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace lexmatcher {

struct FrequencyEntry {
    std::uint64_t rank = 0; // 1-based
    std::string token;
    std::uint64_t count = 0;
};

/// Rank/frequency table over one corpus side. Counts are non-increasing with
/// rank; equal counts rank lexicographically.
struct FrequencyProfile {
    std::vector<FrequencyEntry> table;
    std::uint64_t unique_types = 0;
    std::uint64_t total_tokens = 0;
};

FrequencyProfile frequency_profile(const std::vector<std::string>& sentences,
                                   const Tokenizer& tokenizer, int threads = 1);

struct ProfileComparison {
    std::uint64_t unique_types_a = 0;
    std::uint64_t unique_types_b = 0;
    std::uint64_t total_tokens_a = 0;
    std::uint64_t total_tokens_b = 0;
    double head_mass_a = 0.0; // share of tokens in the top 100 ranks
    double head_mass_b = 0.0;

    std::string to_json() const;
};

ProfileComparison compare_profiles(const FrequencyProfile& a, const FrequencyProfile& b);

/// `rank,token,count` rows.
void write_profile_csv(const FrequencyProfile& profile, const std::filesystem::path& path);

/// `rank,log10_count_a,log10_count_b` rows up to the longer table, blank when
/// a profile has no entry at that rank; for external plotting.
void write_rank_logfreq_csv(const FrequencyProfile& a, const FrequencyProfile& b,
                            const std::filesystem::path& path);

struct SubsetSizeRow {
    int k = 0;
    std::uint64_t subset_size = 0;
};

/// |S_r| per K (fresh retrieval per K), plus the raw corpus size.
std::vector<SubsetSizeRow> subset_size_table(const Corpus& corpus, const Lexicon& lexicon,
                                             const std::vector<int>& ks, const PairResources& res,
                                             const RetrieveOptions& options = {});

/// `k,subset_size` rows; the first row reports the raw corpus size as k=raw.
void write_subset_sizes_csv(const std::vector<SubsetSizeRow>& rows, std::uint64_t raw_size,
                            const std::filesystem::path& path);

} // namespace lexmatcher
