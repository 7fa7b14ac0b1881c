#include <fstream>
#include <sstream>
#include <stdexcept>

#include "slafem/mesh.hpp"
#include "slafem/outputs.hpp"

namespace slafem {

namespace {

Dof parse_dof(const std::string& s) {
  if (s == "x" || s == "X") return Dof::X;
  if (s == "y" || s == "Y") return Dof::Y;
  throw std::runtime_error("unknown dof direction '" + s + "'");
}

const char* dof_name(Dof d) { return d == Dof::X ? "x" : "y"; }

// next line with comments stripped and surrounding whitespace removed
bool next_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto from = line.find_first_not_of(" \t\r\n");
    if (from == std::string::npos) continue;
    auto to = line.find_last_not_of(" \t\r\n");
    line = line.substr(from, to - from + 1);
    return true;
  }
  return false;
}

std::string data_line(std::istream& in, const char* section) {
  std::string line;
  if (!next_line(in, line)) {
    throw std::runtime_error(std::string("truncated ") + section + " section");
  }
  return line;
}

int read_count(std::istringstream& ls, const char* section) {
  int count = -1;
  ls >> count;
  if (!ls || count < 0) {
    throw std::runtime_error(std::string(section) + " section needs a count");
  }
  return count;
}

Monitor parse_monitor(const std::string& line) {
  std::istringstream ls(line);
  Monitor m;
  std::string kind;
  ls >> m.name >> kind;
  if (!ls) throw std::runtime_error("monitor line needs a name and a kind");
  if (kind == "load") {
    m.kind = Monitor::Kind::Load;
  } else if (kind == "disp") {
    m.kind = Monitor::Kind::Disp;
  } else {
    throw std::runtime_error("monitor kind must be load or disp, got '" + kind + "'");
  }
  Monitor::Term t;
  std::string dir;
  while (ls >> t.node >> dir >> t.weight) {
    t.dir = parse_dof(dir);
    m.terms.push_back(t);
  }
  if (m.terms.empty()) throw std::runtime_error("monitor '" + m.name + "' has no terms");
  return m;
}

}  // namespace

Mesh read_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open mesh file '" + path + "'");
  Mesh m;
  std::string line;
  int monitors = 0;
  while (next_line(in, line)) {
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "THICKNESS") {
      ls >> m.thickness;
      if (!ls) throw std::runtime_error("THICKNESS needs a value");
    } else if (tag == "NODES") {
      int count = read_count(ls, "NODES");
      m.nodes.reserve(count);
      for (int i = 0; i < count; ++i) {
        std::istringstream rs(data_line(in, "NODES"));
        Node n;
        rs >> n.id >> n.x >> n.y;
        if (!rs) throw std::runtime_error("bad node line '" + rs.str() + "'");
        m.nodes.push_back(n);
      }
    } else if (tag == "QUADS") {
      int count = read_count(ls, "QUADS");
      m.quads.reserve(count);
      for (int i = 0; i < count; ++i) {
        std::istringstream rs(data_line(in, "QUADS"));
        QuadElement q;
        rs >> q.id >> q.nodes[0] >> q.nodes[1] >> q.nodes[2] >> q.nodes[3] >> q.material_id;
        if (!rs) throw std::runtime_error("bad quad line '" + rs.str() + "'");
        m.quads.push_back(q);
      }
    } else if (tag == "INTERFACES") {
      int count = read_count(ls, "INTERFACES");
      m.interfaces.reserve(count);
      for (int i = 0; i < count; ++i) {
        std::istringstream rs(data_line(in, "INTERFACES"));
        InterfaceElement f;
        rs >> f.id >> f.nodes[0] >> f.nodes[1] >> f.nodes[2] >> f.nodes[3];
        if (!rs) throw std::runtime_error("bad interface line '" + rs.str() + "'");
        m.interfaces.push_back(f);
      }
    } else if (tag == "SUPPORTS") {
      int count = read_count(ls, "SUPPORTS");
      for (int i = 0; i < count; ++i) {
        std::istringstream rs(data_line(in, "SUPPORTS"));
        Support s;
        std::string dir;
        rs >> s.node >> dir;
        if (!rs) throw std::runtime_error("bad support line '" + rs.str() + "'");
        s.dir = parse_dof(dir);
        m.supports.push_back(s);
      }
    } else if (tag == "LOADS") {
      int count = read_count(ls, "LOADS");
      for (int i = 0; i < count; ++i) {
        std::istringstream rs(data_line(in, "LOADS"));
        PointLoad l;
        std::string dir;
        rs >> l.node >> dir >> l.value;
        if (!rs) throw std::runtime_error("bad load line '" + rs.str() + "'");
        l.dir = parse_dof(dir);
        m.loads.push_back(l);
      }
    } else if (tag == "MONITORS") {
      int count = read_count(ls, "MONITORS");
      if (count != 2) throw std::runtime_error("exactly two monitors expected (control, response)");
      m.control = parse_monitor(data_line(in, "MONITORS"));
      m.response = parse_monitor(data_line(in, "MONITORS"));
      monitors = 2;
    } else {
      throw std::runtime_error("unknown mesh section '" + tag + "'");
    }
  }
  if (monitors != 2) throw std::runtime_error("mesh file has no MONITORS section");
  m.validate();
  return m;
}

void write_mesh(const Mesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write mesh file '" + path + "'");
  out << "THICKNESS " << format_double(mesh.thickness) << "\n";
  out << "NODES " << mesh.nodes.size() << "\n";
  for (const Node& n : mesh.nodes) {
    out << n.id << " " << format_double(n.x) << " " << format_double(n.y) << "\n";
  }
  out << "QUADS " << mesh.quads.size() << "\n";
  for (const QuadElement& q : mesh.quads) {
    out << q.id << " " << q.nodes[0] << " " << q.nodes[1] << " " << q.nodes[2] << " "
        << q.nodes[3] << " " << q.material_id << "\n";
  }
  out << "INTERFACES " << mesh.interfaces.size() << "\n";
  for (const InterfaceElement& f : mesh.interfaces) {
    out << f.id << " " << f.nodes[0] << " " << f.nodes[1] << " " << f.nodes[2] << " "
        << f.nodes[3] << "\n";
  }
  out << "SUPPORTS " << mesh.supports.size() << "\n";
  for (const Support& s : mesh.supports) {
    out << s.node << " " << dof_name(s.dir) << "\n";
  }
  out << "LOADS " << mesh.loads.size() << "\n";
  for (const PointLoad& l : mesh.loads) {
    out << l.node << " " << dof_name(l.dir) << " " << format_double(l.value) << "\n";
  }
  out << "MONITORS 2\n";
  for (const Monitor* m : {&mesh.control, &mesh.response}) {
    out << m->name << " " << (m->kind == Monitor::Kind::Load ? "load" : "disp");
    for (const Monitor::Term& t : m->terms) {
      out << " " << t.node << " " << dof_name(t.dir) << " " << format_double(t.weight);
    }
    out << "\n";
  }
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace slafem
