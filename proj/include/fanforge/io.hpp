#pragma once

#include <string>

#include "fanforge/analyze.hpp"
#include "fanforge/comb.hpp"
#include "fanforge/construct.hpp"
#include "fanforge/geometry.hpp"
#include "fanforge/homeo.hpp"

namespace fanforge {

// Interchange files. Rationals are exact "p/q" strings; encoding is deterministic,
// so encode(decode(text)) == text for any text produced by encode.
std::string encode_comb(const Comb& c);
Comb decode_comb(const std::string& text);  // SchemaError naming the offending path
std::string encode_spatial(const SpatialModel& m);
SpatialModel decode_spatial(const std::string& text);

// True when the document carries the spatial format tag.
bool is_spatial_document(const std::string& text);

std::string encode_verify_report(const VerifyReport& r, const std::string& comb_ref);
std::string encode_descriptor(const CellMapDescriptor& d);
std::string encode_recipe(const Recipe& r);
std::string encode_smoothness(const SmoothnessReport& r, const std::string& target);

std::string read_text_file(const std::string& path);  // ArgumentError when unreadable
void write_text_file(const std::string& path, const std::string& text);

}  // namespace fanforge
