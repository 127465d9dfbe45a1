#include "p2k/json_io.hpp"

#include <fstream>

#include "p2k/error.hpp"

namespace p2k {

json to_json(const AttributeEntry& e) { return {{"key", e.key()}, {"value", e.value()}}; }

json to_json(std::span<const AttributeEntry> entries) {
    json out = json::array();
    for (const auto& e : entries) out.push_back(to_json(e));
    return out;
}

json to_json(const VisualDictionary& d) { return to_json(d.entries()); }

json to_json(const SignedEntry& e) {
    return {{"key", e.entry.key()}, {"value", e.entry.value()}, {"polarity", static_cast<int>(e.polarity)}};
}

json to_json(const QueryDictionary& q) {
    json out = json::array();
    for (const auto& e : q) out.push_back(to_json(e));
    return out;
}

json to_json(const EditProgram& p) {
    json out = json::array();
    for (std::size_t i = 0; i < p.updates.size(); ++i) {
        json row = to_json(p.updates[i]);
        if (i < p.source_spans.size()) row["span"] = {p.source_spans[i].begin, p.source_spans[i].end};
        out.push_back(std::move(row));
    }
    return out;
}

json to_json(const GalleryItem& item) {
    return {{"id", item.id}, {"dictionary", to_json(item.dictionary)}, {"tags", item.tags}};
}

AttributeEntry entry_from_json(const json& j) {
    if (!j.is_object() || !j.contains("key") || !j.contains("value") || !j["key"].is_string() ||
        !j["value"].is_string()) {
        throw Error(ErrorCode::InvalidArgument, "entry must be {\"key\": str, \"value\": str}, got " + j.dump());
    }
    return canonicalize(j["key"].get<std::string>(), j["value"].get<std::string>());
}

std::vector<AttributeEntry> entries_from_json(const json& j) {
    if (!j.is_array()) throw Error(ErrorCode::InvalidArgument, "expected an array of entries");
    std::vector<AttributeEntry> out;
    out.reserve(j.size());
    for (const auto& e : j) out.push_back(entry_from_json(e));
    return out;
}

VisualDictionary dictionary_from_json(const json& j) { return VisualDictionary(entries_from_json(j)); }

GalleryItem gallery_item_from_json(const json& j) {
    if (!j.is_object() || !j.contains("id") || !j["id"].is_string()) {
        throw Error(ErrorCode::InvalidArgument, "gallery row needs a string \"id\"");
    }
    GalleryItem item;
    item.id = j["id"].get<std::string>();
    if (item.id.empty()) throw Error(ErrorCode::InvalidArgument, "gallery id must be non-empty");
    item.dictionary = dictionary_from_json(j.value("dictionary", json::array()));
    if (j.contains("tags")) {
        if (!j["tags"].is_array()) throw Error(ErrorCode::InvalidArgument, "\"tags\" must be an array of strings");
        for (const auto& t : j["tags"]) {
            if (!t.is_string()) throw Error(ErrorCode::InvalidArgument, "\"tags\" must be an array of strings");
            item.tags.insert(t.get<std::string>());
        }
    }
    return item;
}

std::vector<json> read_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    std::vector<json> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            rows.push_back(json::parse(line));
        } catch (const json::exception& e) {
            throw Error(ErrorCode::InvalidArgument,
                        path.string() + ":" + std::to_string(line_no) + ": invalid JSON: " + e.what());
        }
    }
    return rows;
}

void write_jsonl(const std::filesystem::path& path, const std::vector<json>& rows) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    for (const auto& row : rows) out << row.dump() << '\n';
    if (!out) throw Error(ErrorCode::Io, "failed writing " + path.string());
}

std::vector<GalleryItem> load_gallery_jsonl(const std::filesystem::path& path) {
    auto rows = read_jsonl(path);
    std::vector<GalleryItem> items;
    items.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        try {
            items.push_back(gallery_item_from_json(rows[i]));
        } catch (const Error& e) {
            throw Error(e.code(), path.string() + " row " + std::to_string(i + 1) + ": " + e.what());
        }
    }
    return items;
}

void save_gallery_jsonl(const std::filesystem::path& path, std::span<const GalleryItem> items) {
    std::vector<json> rows;
    rows.reserve(items.size());
    for (const auto& item : items) rows.push_back(to_json(item));
    write_jsonl(path, rows);
}

}  // namespace p2k
