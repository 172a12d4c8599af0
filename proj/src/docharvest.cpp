#include "nlcorpus/docharvest.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "nlcorpus/errors.hpp"
#include "nlcorpus/util.hpp"

namespace nlcorpus::docharvest {

DocKind doc_kind_from_string(std::string_view s) {
    if (s == "function") return DocKind::function;
    if (s == "class") return DocKind::klass;
    if (s == "method") return DocKind::method;
    throw Error("unknown doc entry kind: " + std::string(s));
}

std::string_view to_string(DocKind k) {
    switch (k) {
        case DocKind::function: return "function";
        case DocKind::klass: return "class";
        case DocKind::method: return "method";
    }
    return "function";
}

namespace {

std::string collapse_whitespace(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool in_ws = false;
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            in_ws = true;
            continue;
        }
        if (in_ws && !out.empty()) out += ' ';
        in_ws = false;
        out += c;
    }
    return out;
}

void split_paragraph(std::string_view paragraph, std::vector<std::string>& out) {
    std::string text = collapse_whitespace(paragraph);
    if (text.empty()) return;
    int paren_depth = 0;
    std::size_t start = 0;
    std::size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (c == '(') {
            ++paren_depth;
        } else if (c == ')') {
            if (paren_depth > 0) --paren_depth;
        } else if (c == '.' || c == '!' || c == '?') {
            std::size_t j = i;
            while (j + 1 < text.size() &&
                   (text[j + 1] == '.' || text[j + 1] == '!' || text[j + 1] == '?'))
                ++j;
            bool at_end = j + 1 == text.size();
            if (paren_depth == 0 && (at_end || text[j + 1] == ' ')) {
                std::string sentence = trim(std::string_view(text).substr(start, j + 1 - start));
                if (!sentence.empty()) out.push_back(std::move(sentence));
                i = j + 1;
                start = i;
                continue;
            }
            i = j;
        }
        ++i;
    }
    std::string tail = trim(std::string_view(text).substr(start));
    if (!tail.empty()) out.push_back(std::move(tail));
}

} // namespace

std::vector<std::string> split_sentences(std::string_view description) {
    std::vector<std::string> out;
    // paragraph boundaries: one or more blank lines
    std::size_t start = 0;
    std::size_t i = 0;
    auto flush = [&](std::size_t end) {
        if (end > start) split_paragraph(description.substr(start, end - start), out);
    };
    while (i < description.size()) {
        if (description[i] == '\n') {
            std::size_t j = i + 1;
            while (j < description.size() &&
                   (description[j] == ' ' || description[j] == '\t' || description[j] == '\r'))
                ++j;
            if (j < description.size() && description[j] == '\n') {
                flush(i);
                while (j < description.size() && std::isspace(static_cast<unsigned char>(description[j])))
                    ++j;
                start = i = j;
                continue;
            }
        }
        ++i;
    }
    flush(description.size());
    return out;
}

std::string build_intent(std::string_view description, const sigparse::UsageSnippet& usage) {
    std::vector<std::string> sentences = split_sentences(description);
    if (sentences.empty())
        throw EmptyDescription("description has no sentences");

    std::vector<std::size_t> selected{0};
    std::vector<std::string> unmentioned;
    for (const auto& arg : usage.included_args) {
        bool found = false;
        for (std::size_t s = 0; s < sentences.size(); ++s) {
            if (!contains_word(sentences[s], arg)) continue;
            found = true;
            if (std::find(selected.begin(), selected.end(), s) == selected.end())
                selected.push_back(s);
            break;
        }
        if (!found) unmentioned.push_back(arg);
    }

    std::string intent;
    for (std::size_t idx : selected) {
        if (!intent.empty()) intent += ' ';
        intent += sentences[idx];
    }
    if (!unmentioned.empty()) {
        std::string tail = "With arguments ";
        for (std::size_t i = 0; i < unmentioned.size(); ++i) {
            if (i > 0) tail += ", ";
            tail += "'" + unmentioned[i] + "'";
        }
        tail += " ...";
        intent += intent.empty() ? tail : " " + tail;
    }
    return intent;
}

namespace {

bool starts_with(std::string_view s, std::string_view prefix) {
    return s.size() >= prefix.size() && s.substr(0, prefix.size()) == prefix;
}

std::string qualify_name(const DocEntry& entry, const std::string& parsed_name) {
    if (entry.kind == DocKind::method) {
        std::string owner = entry.owner_class.value_or("");
        std::string prefix = entry.module.empty() ? owner : entry.module + "." + owner;
        if (parsed_name.find('.') == std::string::npos)
            return prefix.empty() ? parsed_name : prefix + "." + parsed_name;
        if (!entry.module.empty() && !starts_with(parsed_name, entry.module + "."))
            return entry.module + "." + parsed_name;
        return parsed_name;
    }
    if (entry.module.empty() || starts_with(parsed_name, entry.module + "."))
        return parsed_name;
    return entry.module + "." + parsed_name;
}

} // namespace

sigparse::Signature parse_entry_signature(const DocEntry& entry) {
    using sigparse::EntryKind;
    EntryKind kind = entry.kind == DocKind::function ? EntryKind::function
                     : entry.kind == DocKind::klass  ? EntryKind::constructor
                                                     : EntryKind::method;
    if (entry.kind == DocKind::method && !entry.owner_class)
        throw MalformedSignature("method entry " + entry.signature_text + " lacks owner_class");

    // Constructors derive the class name from the prototype; qualify afterwards.
    sigparse::Signature sig = sigparse::parse_signature(
        entry.signature_text, kind,
        entry.kind == DocKind::method ? entry.owner_class : std::nullopt);
    sig.qualified_name = qualify_name(entry, sig.qualified_name);
    if (kind == EntryKind::constructor) {
        std::size_t dot = sig.qualified_name.rfind('.');
        sig.class_name = dot == std::string::npos ? sig.qualified_name
                                                  : sig.qualified_name.substr(dot + 1);
    }
    return sig;
}

HarvestResult harvest(const std::vector<DocEntry>& entries) {
    HarvestResult result;
    std::unordered_set<std::string> seen_ids;
    for (const auto& entry : entries) {
        ++result.stats.entries_read;
        sigparse::Signature sig;
        try {
            sig = parse_entry_signature(entry);
        } catch (const MalformedSignature& e) {
            ++result.stats.entries_skipped;
            log_warn(std::string("skipping entry: ") + e.what());
            continue;
        }
        for (const auto& usage : sigparse::enumerate_usages(sig)) {
            std::string snippet = sigparse::render_usage(sig, usage);
            std::string intent;
            try {
                intent = build_intent(entry.description, usage);
            } catch (const EmptyDescription&) {
                ++result.stats.pairs_skipped;
                continue;
            }
            ++result.stats.pairs_emitted;
            NLCodePair pair = NLCodePair::make(std::move(intent), std::move(snippet), Source::api);
            if (seen_ids.insert(pair.pair_id).second)
                result.pairs.push_back(std::move(pair));
        }
    }
    result.stats.distinct_pairs = result.pairs.size();
    return result;
}

DocDump read_doc_dump(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open doc dump " + path.string());

    DocDump dump;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        try {
            nlohmann::json j = nlohmann::json::parse(line);
            DocEntry entry;
            entry.module = j.value("module", std::string());
            entry.kind = doc_kind_from_string(j.at("kind").get<std::string>());
            if (j.contains("owner_class") && j["owner_class"].is_string())
                entry.owner_class = j["owner_class"].get<std::string>();
            entry.signature_text = j.at("signature_text").get<std::string>();
            entry.description = j.value("description", std::string());
            if (entry.signature_text.empty()) throw Error("empty signature_text");
            if (entry.kind == DocKind::method && !entry.owner_class)
                throw Error("method entry lacks owner_class");
            dump.entries.push_back(std::move(entry));
        } catch (const std::exception& e) {
            dump.malformed_lines.push_back(line_no);
            log_warn("doc dump line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return dump;
}

} // namespace nlcorpus::docharvest
