#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "p2k/dictionary.hpp"
#include "p2k/edit_parser.hpp"
#include "p2k/gallery_index.hpp"

namespace p2k {

using json = nlohmann::json;

json to_json(const AttributeEntry& e);
json to_json(std::span<const AttributeEntry> entries);
json to_json(const VisualDictionary& d);
json to_json(const SignedEntry& e);
json to_json(const QueryDictionary& q);
json to_json(const EditProgram& p);
json to_json(const GalleryItem& item);

/// Entries are canonicalized on the way in; bad shapes throw InvalidArgument.
AttributeEntry entry_from_json(const json& j);
std::vector<AttributeEntry> entries_from_json(const json& j);
VisualDictionary dictionary_from_json(const json& j);
GalleryItem gallery_item_from_json(const json& j);

/// Reads one JSON object per non-blank line; errors carry the line number.
std::vector<json> read_jsonl(const std::filesystem::path& path);
void write_jsonl(const std::filesystem::path& path, const std::vector<json>& rows);

std::vector<GalleryItem> load_gallery_jsonl(const std::filesystem::path& path);
void save_gallery_jsonl(const std::filesystem::path& path, std::span<const GalleryItem> items);

}  // namespace p2k
