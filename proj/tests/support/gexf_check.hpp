#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace techmap::testkit {

/// Structural validation of a GEXF 1.3 document: namespace and version,
/// element order inside <graph>, enumerated attribute values, declared
/// attribute types, typed attvalues, unique node and edge ids, edge
/// endpoints, numeric weights and viz coordinates. The XSD itself is not
/// available offline, so its rules for the elements we emit are encoded
/// here. Returns one message per violation.
std::vector<std::string> check_gexf(std::istream& in);

} // namespace techmap::testkit
