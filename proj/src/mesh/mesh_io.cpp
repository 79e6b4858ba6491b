#include "mrbf/mesh_io.hpp"

#include "mrbf/errors.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace mrbf {

namespace {

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  // Next non-blank, non-comment line split into tokens; empty at end of input.
  std::vector<std::string> next() {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      std::istringstream ss(line);
      std::vector<std::string> tokens;
      for (std::string t; ss >> t;) tokens.push_back(t);
      if (tokens.empty() || tokens.front().starts_with('#')) continue;
      return tokens;
    }
    return {};
  }

  [[nodiscard]] int line() const { return line_no_; }

  [[noreturn]] void fail(const std::string& msg) const {
    raise(ErrorCode::FormatError, "line " + std::to_string(line_no_) + ": " + msg);
  }

 private:
  std::istream& in_;
  int line_no_ = 0;
};

template <class T>
T parse_number(const LineReader& reader, const std::string& token) {
  T value{};
  const auto* first = token.data();
  const auto* last = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) reader.fail("cannot parse number '" + token + "'");
  return value;
}

std::vector<std::string> expect_section(LineReader& reader, const std::string& name,
                                        std::size_t n_tokens) {
  auto tokens = reader.next();
  if (tokens.empty()) {
    raise(ErrorCode::FormatError, "unexpected end of file: missing '" + name + "' section");
  }
  if (tokens.front() != name) reader.fail("expected '" + name + "' section, found '" + tokens.front() + "'");
  if (tokens.size() != n_tokens) reader.fail("malformed '" + name + "' header");
  return tokens;
}

}  // namespace

Mesh read_mesh(std::istream& in) {
  LineReader reader(in);
  auto header = reader.next();
  if (header.empty()) raise(ErrorCode::FormatError, "empty file: missing 'meshfmt' header");
  if (header.size() != 2 || header[0] != "meshfmt" || header[1] != "1") {
    reader.fail("expected header 'meshfmt 1'");
  }

  Side side = Side::None;
  auto tokens = reader.next();
  if (!tokens.empty() && tokens.front() == "side") {
    if (tokens.size() != 2) reader.fail("malformed 'side' line");
    if (tokens[1] == "master") {
      side = Side::Master;
    } else if (tokens[1] == "slave") {
      side = Side::Slave;
    } else {
      reader.fail("unknown side '" + tokens[1] + "'");
    }
    tokens = reader.next();
  }
  if (tokens.empty()) raise(ErrorCode::FormatError, "unexpected end of file: missing 'nodes' section");
  if (tokens.front() != "nodes" || tokens.size() != 3) reader.fail("expected 'nodes <count> <dim>'");
  const auto n_nodes = parse_number<long>(reader, tokens[1]);
  const auto dim = parse_number<int>(reader, tokens[2]);
  if (n_nodes < 0 || dim < 1 || dim > 3) reader.fail("invalid node count or dimension");

  std::vector<Vec3> nodes;
  nodes.reserve(static_cast<std::size_t>(n_nodes));
  for (long i = 0; i < n_nodes; ++i) {
    auto row = reader.next();
    if (row.empty()) {
      raise(ErrorCode::FormatError, "unexpected end of file in 'nodes' section after " +
                                        std::to_string(i) + " of " + std::to_string(n_nodes) + " rows");
    }
    if (row.size() != static_cast<std::size_t>(dim)) {
      reader.fail("node row has " + std::to_string(row.size()) + " coordinates, expected " +
                  std::to_string(dim));
    }
    Vec3 x = Vec3::Zero();
    for (int c = 0; c < dim; ++c) x[c] = parse_number<double>(reader, row[static_cast<std::size_t>(c)]);
    nodes.push_back(x);
  }

  tokens = expect_section(reader, "elements", 3);
  const auto n_elems = parse_number<long>(reader, tokens[1]);
  ElementKind kind{};
  try {
    kind = element_kind_from_string(tokens[2]);
  } catch (const Error&) {
    reader.fail("unknown element kind '" + tokens[2] + "'");
  }
  const int npe = node_count(kind);
  std::vector<Index> conn;
  conn.reserve(static_cast<std::size_t>(n_elems * npe));
  for (long e = 0; e < n_elems; ++e) {
    auto row = reader.next();
    if (row.empty()) {
      raise(ErrorCode::FormatError, "unexpected end of file in 'elements' section after " +
                                        std::to_string(e) + " of " + std::to_string(n_elems) + " rows");
    }
    if (row.size() != static_cast<std::size_t>(npe)) reader.fail("element row has wrong node count");
    for (const auto& t : row) {
      const auto id = parse_number<long>(reader, t);
      if (id < 0 || id >= n_nodes) reader.fail("node id " + t + " out of range");
      conn.push_back(static_cast<Index>(id));
    }
  }

  Mesh mesh(dim, kind, std::move(nodes), std::move(conn), side);

  tokens = reader.next();
  if (!tokens.empty()) {
    if (tokens.front() != "tags" || tokens.size() != 2) reader.fail("expected 'tags <count>' or end of file");
    const auto n_tags = parse_number<long>(reader, tokens[1]);
    for (long t = 0; t < n_tags; ++t) {
      auto row = reader.next();
      if (row.empty()) raise(ErrorCode::FormatError, "unexpected end of file in 'tags' section");
      try {
        if (row[0] == "edge" && row.size() == 4) {
          mesh.tag_edge(parse_number<Index>(reader, row[1]), parse_number<Index>(reader, row[2]), row[3]);
        } else if (row[0] == "element" && row.size() == 3) {
          mesh.tag_element(parse_number<Index>(reader, row[1]), row[2]);
        } else {
          reader.fail("malformed tag row");
        }
      } catch (const Error& err) {
        if (err.code() == ErrorCode::FormatError) throw;
        reader.fail(err.what());
      }
    }
    if (!reader.next().empty()) reader.fail("trailing content after 'tags' section");
  }
  return mesh;
}

void write_mesh(const Mesh& mesh, std::ostream& out) {
  char buf[64];
  const auto fmt = [&buf](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  out << "meshfmt 1\n";
  if (mesh.side() != Side::None) out << "side " << to_string(mesh.side()) << '\n';
  out << "nodes " << mesh.num_nodes() << ' ' << mesh.dim() << '\n';
  for (const auto& x : mesh.nodes()) {
    for (int c = 0; c < mesh.dim(); ++c) out << (c ? " " : "") << fmt(x[c]);
    out << '\n';
  }
  out << "elements " << mesh.num_elements() << ' ' << to_string(mesh.kind()) << '\n';
  for (Index e = 0; e < mesh.num_elements(); ++e) {
    const auto ids = mesh.element(e);
    for (std::size_t i = 0; i < ids.size(); ++i) out << (i ? " " : "") << ids[i];
    out << '\n';
  }
  const std::size_t n_tags = mesh.edge_tags().size() + mesh.element_tags().size();
  if (n_tags > 0) {
    out << "tags " << n_tags << '\n';
    for (const auto& [edge, tag] : mesh.edge_tags()) {
      out << "edge " << edge.first << ' ' << edge.second << ' ' << tag << '\n';
    }
    for (const auto& [elem, tag] : mesh.element_tags()) out << "element " << elem << ' ' << tag << '\n';
  }
}

Mesh load_mesh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::FormatError, "cannot open mesh file " + path.string());
  return read_mesh(in);
}

void save_mesh(const Mesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) raise(ErrorCode::InvalidArgument, "cannot write mesh file " + path.string());
  write_mesh(mesh, out);
}

}  // namespace mrbf
