#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace gasketlab {

/// Operation coverage registry: public operations register each call so the
/// end-to-end driver can assert that a full run exercised everything.
void mark_op(const std::string& name);
std::map<std::string, long long> op_coverage();
void reset_op_coverage();

/// SHA-1 hex digest (content hashes embedded in reports).
std::string sha1_hex(const std::string& data);

/// Deterministic double formatting for reports and SVG.
std::string format_double(double v, int precision = 9);

}  // namespace gasketlab
