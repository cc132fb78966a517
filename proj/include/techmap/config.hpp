#pragma once

#include "techmap/analyze.hpp"
#include "techmap/corpus.hpp"
#include "techmap/extract.hpp"
#include "techmap/graph.hpp"
#include "techmap/layout.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace techmap::config {

/// Flat view of an INI-style file: `[section]` headers, `key = value` lines,
/// '#' or ';' comments. Key names are unique across sections so each one
/// maps to a same-named command-line flag.
struct RawConfig {
    struct Entry {
        std::string section;
        std::string value;
        /// Relative paths in a file resolve against its directory;
        /// command-line values resolve against the working directory.
        std::filesystem::path base;
    };
    std::map<std::string, Entry> entries;
};

RawConfig parse_ini(std::istream& in, const std::string& source, const std::filesystem::path& base = {});
RawConfig load_ini(const std::filesystem::path& path);

/// Every known key with its section, default value and help text, in file order.
struct KeySpec {
    std::string key;
    std::string section;
    std::string default_value;
    std::string help;
};
const std::vector<KeySpec>& known_keys();

struct PipelineConfig {
    // [paths]
    std::filesystem::path corpus;
    corpus::Format corpus_format = corpus::Format::jsonl;
    std::filesystem::path conllu;
    std::optional<std::filesystem::path> annotations;
    std::optional<std::filesystem::path> concept_terms;
    std::optional<std::filesystem::path> gazetteer;
    std::optional<std::filesystem::path> blacklist;
    std::optional<std::filesystem::path> leading_words;
    std::optional<std::filesystem::path> suffix_rules;
    std::filesystem::path output_dir = "techmap_out";

    // [ingest]
    corpus::YearWindow years;
    corpus::MatchMode match_mode = corpus::MatchMode::word;
    bool skip_malformed = false;

    // [extract]
    extract::HeadSource recognizer = extract::HeadSource::gazetteer;
    bool blacklist_concepts = true;

    // [graph]
    int period_length = 2;
    std::optional<int> first_year;
    std::optional<int> last_year;
    graph::SemanticRelation semantic_relation = graph::SemanticRelation::prefix_suffix;
    double min_total_weight = 0.0;

    // [analyze]
    analyze::AnalysisOptions analysis;
    std::optional<std::string> delta_from; // period label, e.g. "2017-2018"
    std::optional<std::string> delta_to;

    // [layout]
    layout::LayoutParams layout;
    layout::StopCriteria layout_stop;

    // [export]
    bool export_gexf = true;
    bool export_json = true;

    // [run]
    std::uint64_t seed = 42;
    unsigned threads = 0;
    std::size_t top_k = 10;

    /// sha256 over the effective key=value list, excluding output_dir.
    std::string hash;
};

/// Applies `overrides` (key -> value) on top of `raw`, converts and checks
/// every value, and throws one ConfigError listing all problems. With
/// `require_inputs`, input files must exist.
PipelineConfig resolve(RawConfig raw, const std::map<std::string, std::string>& overrides,
                       bool require_inputs = true);

/// Effective configuration as INI text (stable order), e.g. for the manifest.
std::string to_ini(const RawConfig& raw);

} // namespace techmap::config
