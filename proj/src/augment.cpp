#include "lexmatcher/augment.hpp"

#include "lexmatcher/corpus.hpp"
#include "lexmatcher/error.hpp"
#include "lexmatcher/text.hpp"

#ifndef LEXMATCHER_NO_TLS
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>
#include <nlohmann/json.hpp>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <thread>
#include <unordered_map>

namespace lexmatcher {

namespace {

constexpr std::string_view kPlaceholders[] = {
    "{SOURCE_SEGMENT}", "{TARGET_SEGMENT}", "{DEFINITION}", "{SOURCE_LANG}", "{TARGET_LANG}",
};

constexpr const char* kBuiltinTemplate =
    "Generate a pair of parallel sentences in {SOURCE_LANG} and {TARGET_LANG} that reflects the "
    "meaning of the given segment pair accurately. Keep both sentences precise and concise: the "
    "{SOURCE_LANG} sentence must contain the {SOURCE_LANG} segment and the {TARGET_LANG} sentence "
    "must contain the {TARGET_LANG} segment. Answer with exactly two lines labeled \"Source:\" "
    "and \"Target:\".\n"
    "\n"
    "Example of the format:\n"
    "Segment pair: \"bank\" means \"\xE9\x93\xB6\xE8\xA1\x8C\"\n"
    "Definition: a financial institution that accepts deposits and channels the money into "
    "lending activities\n"
    "Source: I deposited my salary at the bank this morning.\n"
    "Target: \xE6\x88\x91\xE4\xBB\x8A\xE5\xA4\xA9\xE6\x97\xA9\xE4\xB8\x8A\xE6\x8A\x8A\xE5\xB7\xA5"
    "\xE8\xB5\x84\xE5\xAD\x98\xE8\xBF\x9B\xE4\xBA\x86\xE9\x93\xB6\xE8\xA1\x8C\xE3\x80\x82\n"
    "\n"
    "Now generate for:\n"
    "Segment pair: \"{SOURCE_SEGMENT}\" means \"{TARGET_SEGMENT}\"\n"
    "Definition: {DEFINITION}\n";

std::string replace_all(std::string text, std::string_view from, std::string_view to) {
    std::size_t pos = 0;
    while ((pos = text.find(from, pos)) != std::string::npos) {
        text.replace(pos, from.size(), to);
        pos += to.size();
    }
    return text;
}

} // namespace

PromptTemplate PromptTemplate::from_text(std::string text) {
    for (std::string_view placeholder : kPlaceholders) {
        if (text.find(placeholder) == std::string::npos) {
            throw ConfigError("prompt template is missing the placeholder " +
                              std::string(placeholder));
        }
    }
    return PromptTemplate(std::move(text));
}

PromptTemplate PromptTemplate::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_text(std::move(text));
}

PromptTemplate PromptTemplate::builtin() { return from_text(kBuiltinTemplate); }

std::string language_name(std::string_view lang_tag) {
    std::string_view base = lang_tag.substr(0, lang_tag.find_first_of("-_"));
    static const std::unordered_map<std::string_view, std::string_view> names = {
        {"en", "English"}, {"zh", "Chinese"},  {"de", "German"},    {"ru", "Russian"},
        {"fr", "French"},  {"es", "Spanish"},  {"ja", "Japanese"},  {"ko", "Korean"},
        {"cs", "Czech"},   {"uk", "Ukrainian"},{"pt", "Portuguese"},{"it", "Italian"},
    };
    auto it = names.find(base);
    return it == names.end() ? std::string(lang_tag) : std::string(it->second);
}

std::vector<AugmentPrompt> render_prompts(const std::vector<const SensePair*>& gaps,
                                          const PromptTemplate& tmpl, const PairResources& res) {
    std::vector<AugmentPrompt> prompts;
    prompts.reserve(gaps.size());
    const std::string src_lang = language_name(res.source.lang);
    const std::string tgt_lang = language_name(res.target.lang);
    for (const SensePair* sense : gaps) {
        std::string text = tmpl.text();
        text = replace_all(std::move(text), "{SOURCE_SEGMENT}",
                           res.source.tokenizer.join(sense->source_segment));
        text = replace_all(std::move(text), "{TARGET_SEGMENT}",
                           res.target.tokenizer.join(sense->target_segment));
        text = replace_all(std::move(text), "{DEFINITION}",
                           sense->definition.empty() ? "(no definition available)"
                                                     : sense->definition);
        text = replace_all(std::move(text), "{SOURCE_LANG}", src_lang);
        text = replace_all(std::move(text), "{TARGET_LANG}", tgt_lang);
        prompts.push_back({sense->sense_id, std::move(text)});
    }
    return prompts;
}

ChatClient::ChatClient(EndpointConfig config) : config_(std::move(config)) {
    const std::string& url = config_.url;
    std::size_t scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw ConfigError("endpoint url must include a scheme: " + url);
    }
    std::size_t path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        scheme_host_ = url;
        path_ = "/v1/chat/completions";
    } else {
        scheme_host_ = url.substr(0, path_start);
        path_ = url.substr(path_start);
    }
    if (const char* key = std::getenv(config_.api_key_env.c_str())) api_key_ = key;
}

ChatClient::~ChatClient() = default;

std::vector<LlmResult> ChatClient::complete_batch(const std::vector<AugmentPrompt>& prompts) {
    std::vector<LlmResult> results(prompts.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> auth_failed{false};

    auto worker = [&] {
        httplib::Client client(scheme_host_);
        client.set_connection_timeout(config_.timeout_seconds, 0);
        client.set_read_timeout(config_.timeout_seconds, 0);
        httplib::Headers headers;
        if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= prompts.size() || auth_failed.load()) break;
            LlmResult& result = results[i];
            result.sense_id = prompts[i].sense_id;

            nlohmann::ordered_json body;
            body["model"] = config_.model;
            body["temperature"] = config_.temperature;
            body["messages"] = nlohmann::ordered_json::array(
                {nlohmann::ordered_json{{"role", "user"}, {"content", prompts[i].rendered_text}}});
            const std::string payload = body.dump();

            for (int attempt = 0; attempt < config_.max_attempts; ++attempt) {
                if (attempt > 0) {
                    std::this_thread::sleep_for(std::chrono::milliseconds(
                        config_.backoff_initial_ms * (1 << (attempt - 1))));
                }
                httplib::Result res = client.Post(path_, headers, payload, "application/json");
                if (!res) {
                    result.error = "network error: " + httplib::to_string(res.error());
                    continue;
                }
                if (res->status == 401 || res->status == 403) {
                    auth_failed.store(true);
                    result.error = "authentication failed (HTTP " + std::to_string(res->status) + ")";
                    return;
                }
                if (res->status == 200) {
                    try {
                        nlohmann::json j = nlohmann::json::parse(res->body);
                        result.response =
                            j.at("choices").at(0).at("message").at("content").get<std::string>();
                        result.ok = true;
                        result.error.clear();
                    } catch (const nlohmann::json::exception& e) {
                        result.error = std::string("malformed response body: ") + e.what();
                    }
                    break;
                }
                result.error = "HTTP " + std::to_string(res->status);
                bool transient = res->status == 408 || res->status == 429 || res->status >= 500;
                if (!transient) break;
            }
        }
    };

    int threads = std::max(1, std::min<int>(config_.concurrency,
                                            static_cast<int>(prompts.size())));
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();

    if (auth_failed.load()) {
        throw Error("chat endpoint rejected the API key; set " + config_.api_key_env);
    }
    return results;
}

bool segment_in_text(const std::vector<std::string>& segment_lemmas, std::string_view text,
                     const LangResources& res) {
    if (segment_lemmas.empty()) return false;
    std::vector<std::string> lemmas = res.lemmatizer.lemmatize_all(res.tokenizer.tokenize(text));
    if (lemmas.size() < segment_lemmas.size()) return false;
    for (std::size_t start = 0; start + segment_lemmas.size() <= lemmas.size(); ++start) {
        bool match = true;
        for (std::size_t j = 0; j < segment_lemmas.size(); ++j) {
            if (lemmas[start + j] != segment_lemmas[j]) {
                match = false;
                break;
            }
        }
        if (match) return true;
    }
    return false;
}

namespace {

// First line whose content starts with `label` + ':' (case-insensitive);
// returns the text after the colon, trimmed.
bool find_labeled_line(const std::string& response, std::string_view label, std::string& out) {
    std::size_t pos = 0;
    while (pos <= response.size()) {
        std::size_t eol = response.find('\n', pos);
        if (eol == std::string::npos) eol = response.size();
        std::string_view line = trim(std::string_view(response).substr(pos, eol - pos));
        if (line.size() > label.size()) {
            bool matches = true;
            for (std::size_t i = 0; i < label.size(); ++i) {
                char a = line[i], b = label[i];
                if (a >= 'A' && a <= 'Z') a += 32;
                if (matches && a != b) matches = false;
            }
            std::string_view rest = trim(line.substr(label.size()));
            if (matches && !rest.empty() && rest.front() == ':') {
                out = std::string(trim(rest.substr(1)));
                return true;
            }
        }
        if (eol == response.size()) break;
        pos = eol + 1;
    }
    return false;
}

} // namespace

std::vector<GeneratedPair> parse_and_validate(const std::vector<LlmResult>& results,
                                              const std::vector<SensePair>& gap_senses,
                                              const PairResources& res) {
    std::unordered_map<std::string_view, const SensePair*> by_id;
    for (const SensePair& entry : gap_senses) by_id.emplace(entry.sense_id, &entry);

    std::vector<GeneratedPair> pairs;
    pairs.reserve(results.size());
    for (const LlmResult& result : results) {
        GeneratedPair pair;
        pair.sense_id = result.sense_id;
        pair.raw_response = result.response;
        if (!result.ok) {
            pair.reason = result.error.empty() ? "request failed" : "request failed: " + result.error;
            pairs.push_back(std::move(pair));
            continue;
        }
        auto it = by_id.find(result.sense_id);
        if (it == by_id.end()) {
            pair.reason = "unknown sense id";
            pairs.push_back(std::move(pair));
            continue;
        }
        std::string source, target;
        bool has_source = find_labeled_line(result.response, "source", source);
        bool has_target = find_labeled_line(result.response, "target", target);
        if (!has_source || !has_target) {
            pair.reason = "missing labeled Source:/Target: lines";
            pairs.push_back(std::move(pair));
            continue;
        }
        pair.source_text = std::move(source);
        pair.target_text = std::move(target);
        const SensePair& sense = *it->second;
        if (!segment_in_text(sense.source_segment, pair.source_text, res.source)) {
            pair.reason = "source segment absent";
        } else if (!segment_in_text(sense.target_segment, pair.target_text, res.target)) {
            pair.reason = "target segment absent";
        } else {
            pair.valid = true;
        }
        pairs.push_back(std::move(pair));
    }
    return pairs;
}

namespace {

void write_jsonl(const std::filesystem::path& path,
                 const std::vector<nlohmann::ordered_json>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    for (const auto& row : rows) out << row.dump() << '\n';
    if (!out) throw IoError("write failure on " + path.string());
}

std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path) {
    std::vector<nlohmann::json> rows;
    std::size_t line_no = 0;
    for (const std::string& line : read_lines(path)) {
        ++line_no;
        if (trim(line).empty()) continue;
        try {
            rows.push_back(nlohmann::json::parse(line));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(path.string(), line_no, e.what());
        }
    }
    return rows;
}

} // namespace

void write_prompts_jsonl(const std::vector<AugmentPrompt>& prompts,
                         const std::filesystem::path& path) {
    std::vector<nlohmann::ordered_json> rows;
    rows.reserve(prompts.size());
    for (const AugmentPrompt& prompt : prompts) {
        rows.push_back({{"sense_id", prompt.sense_id}, {"prompt", prompt.rendered_text}});
    }
    write_jsonl(path, rows);
}

std::vector<AugmentPrompt> read_prompts_jsonl(const std::filesystem::path& path) {
    std::vector<AugmentPrompt> prompts;
    for (const auto& row : read_jsonl(path)) {
        prompts.push_back({row.at("sense_id").get<std::string>(),
                           row.at("prompt").get<std::string>()});
    }
    return prompts;
}

void write_responses_jsonl(const std::vector<LlmResult>& results,
                           const std::filesystem::path& path) {
    std::vector<nlohmann::ordered_json> rows;
    rows.reserve(results.size());
    for (const LlmResult& result : results) {
        rows.push_back({{"sense_id", result.sense_id},
                        {"response", result.response},
                        {"ok", result.ok},
                        {"error", result.error}});
    }
    write_jsonl(path, rows);
}

std::vector<LlmResult> read_responses_jsonl(const std::filesystem::path& path) {
    std::vector<LlmResult> results;
    for (const auto& row : read_jsonl(path)) {
        LlmResult result;
        result.sense_id = row.at("sense_id").get<std::string>();
        result.response = row.at("response").get<std::string>();
        result.ok = row.value("ok", true);
        result.error = row.value("error", std::string());
        results.push_back(std::move(result));
    }
    return results;
}

void write_augmented_jsonl(const std::vector<GeneratedPair>& pairs,
                           const std::filesystem::path& path) {
    std::vector<nlohmann::ordered_json> rows;
    rows.reserve(pairs.size());
    for (const GeneratedPair& pair : pairs) {
        rows.push_back({{"sense_id", pair.sense_id},
                        {"source", pair.source_text},
                        {"target", pair.target_text},
                        {"valid", pair.valid},
                        {"reason", pair.reason}});
    }
    write_jsonl(path, rows);
}

std::vector<GeneratedPair> read_augmented_jsonl(const std::filesystem::path& path) {
    std::vector<GeneratedPair> pairs;
    for (const auto& row : read_jsonl(path)) {
        GeneratedPair pair;
        pair.sense_id = row.at("sense_id").get<std::string>();
        pair.source_text = row.at("source").get<std::string>();
        pair.target_text = row.at("target").get<std::string>();
        pair.valid = row.at("valid").get<bool>();
        pair.reason = row.value("reason", std::string());
        pairs.push_back(std::move(pair));
    }
    return pairs;
}

} // namespace lexmatcher
