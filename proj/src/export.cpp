#include "pqc/export.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <unordered_map>

#include "json.hpp"

namespace pqc {

using nlohmann::json;

namespace {

json labels_json(const std::vector<Label>& ls) {
  json a = json::array();
  for (Label l : ls) a.push_back(l.id);
  return a;
}

json wires_json(const std::vector<Wire>& ws) {
  json a = json::array();
  for (const auto& w : ws) a.push_back({{"label", w.label.id}, {"wire", w.type.name}});
  return a;
}

json circuit_json(const Circuit& c) {
  json items = json::array();
  for (const auto& item : c.items()) {
    std::visit(
        [&](const auto& it) {
          using T = std::decay_t<decltype(it)>;
          if constexpr (std::is_same_v<T, GateInstance>) {
            json controls = json::array();
            for (const auto& k : it.controls)
              controls.push_back(
                  {{"polarity", k.gadget.polarity == Polarity::Black ? "black" : "white"},
                   {"label", k.label.id}});
            items.push_back({{"kind", "gate"},
                             {"name", it.name()},
                             {"dagger", it.daggered},
                             {"controls", controls},
                             {"in", labels_json(it.in)},
                             {"out", labels_json(it.out)}});
          } else if constexpr (std::is_same_v<T, PermItem>) {
            json map = json::array();
            for (std::size_t i = 0; i < it.before.size(); ++i)
              map.push_back({it.before[i].id, it.after[i].id});
            items.push_back({{"kind", "perm"}, {"map", map}});
          } else {
            items.push_back({{"kind", "conj"},
                             {"in", labels_json(it.in)},
                             {"out", labels_json(it.out)},
                             {"g", circuit_json(*it.compute)},
                             {"body", circuit_json(*it.body)}});
          }
        },
        item);
  }
  return {{"inputs", wires_json(c.inputs())},
          {"items", items},
          {"outputs", wires_json(c.outputs())},
          {"modality", modality_of(c).value()}};
}

[[noreturn]] void bad(const std::string& what) { throw FormatError("circuit JSON: " + what); }

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) bad(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

Label label_of(const json& j) {
  if (!j.is_number_unsigned()) bad("label must be a non-negative integer");
  return Label{j.get<std::uint32_t>()};
}

std::vector<Label> labels_from(const json& j) {
  if (!j.is_array()) bad("expected a label array");
  std::vector<Label> out;
  for (const auto& x : j) out.push_back(label_of(x));
  return out;
}

std::vector<Wire> wires_from(const json& j, const GateSet& gates) {
  if (!j.is_array()) bad("expected a wire array");
  std::vector<Wire> out;
  for (const auto& w : j) {
    const auto& name = field(w, "wire");
    if (!name.is_string()) bad("wire type must be a string");
    WireType t{name.get<std::string>()};
    if (!gates.has_wire_type(t)) bad("unknown wire type " + t.name);
    out.push_back({label_of(field(w, "label")), t});
  }
  return out;
}

Circuit circuit_from(const json& j, const GateSet& gates) {
  std::vector<Item> items;
  const auto& js = field(j, "items");
  if (!js.is_array()) bad("\"items\" must be an array");
  for (const auto& it : js) {
    const auto& kind = field(it, "kind");
    if (kind == "gate") {
      const auto& name = field(it, "name");
      if (!name.is_string()) bad("gate name must be a string");
      auto def = gates.find(name.get<std::string>());
      if (!def) bad("unknown gate " + name.get<std::string>());
      GateInstance g{def, false, {}, labels_from(field(it, "in")), labels_from(field(it, "out"))};
      if (it.contains("dagger")) {
        if (!it["dagger"].is_boolean()) bad("\"dagger\" must be a boolean");
        g.daggered = it["dagger"].get<bool>();
      }
      if (it.contains("controls")) {
        for (const auto& k : it["controls"]) {
          const auto& pol = field(k, "polarity");
          if (pol != "black" && pol != "white") bad("polarity must be black or white");
          g.controls.push_back(
              {{pol == "black" ? Polarity::Black : Polarity::White}, label_of(field(k, "label"))});
        }
      }
      items.emplace_back(std::move(g));
    } else if (kind == "perm") {
      PermItem p;
      for (const auto& pair : field(it, "map")) {
        if (!pair.is_array() || pair.size() != 2) bad("perm entries are [before, after] pairs");
        p.before.push_back(label_of(pair[0]));
        p.after.push_back(label_of(pair[1]));
      }
      items.emplace_back(std::move(p));
    } else if (kind == "conj") {
      auto compute = std::make_shared<const Circuit>(circuit_from(field(it, "g"), gates));
      auto body = std::make_shared<const Circuit>(circuit_from(field(it, "body"), gates));
      items.emplace_back(ConjItem{labels_from(field(it, "in")), labels_from(field(it, "out")),
                                  std::move(compute), std::move(body)});
    } else {
      bad("unknown item kind " + kind.dump());
    }
  }
  const auto& m = field(j, "modality");
  if (!m.is_number_integer() || m.get<int>() < 0 || m.get<int>() > 2) bad("modality must be 0, 1 or 2");
  Modality claimed(m.get<int>());
  Circuit c(wires_from(field(j, "inputs"), gates), wires_from(field(j, "outputs"), gates),
            std::move(items), claimed);
  try {
    validate(c);
  } catch (const CircuitError& e) {
    bad(e.what());
  }
  if (modality_of(c) != claimed)
    bad("declared modality " + std::to_string(claimed.value()) + " but the items give " +
        std::to_string(modality_of(c).value()));
  return c;
}

// --- ASCII ------------------------------------------------------------------

std::size_t display_width(const std::string& s) {
  return static_cast<std::size_t>(
      std::count_if(s.begin(), s.end(), [](char ch) { return (ch & 0xC0) != 0x80; }));
}

std::string repeat(const std::string& s, std::size_t n) {
  std::string out;
  for (std::size_t i = 0; i < n; ++i) out += s;
  return out;
}

struct Cell {
  std::string text;
  std::shared_ptr<const GateDef> gate;
  bool dagger = false;

  std::string str() const { return gate && dagger ? text + "†" : text; }

  /// The same cell in the adjoint circuit.
  Cell mirrored() const {
    if (!gate) return *this;
    Cell c = *this;
    if (std::holds_alternative<SelfAdjoint>(gate->adjoint)) return c;
    if (const auto* p = std::get_if<AdjointPartner>(&gate->adjoint)) {
      c.text = p->name;
      return c;
    }
    c.dagger = !dagger;
    return c;
  }
};

struct Column {
  std::map<int, Cell> cells;
  std::vector<std::string> fill;  // per row: "─", "═" or "" when the row is idle
};

class Diagram {
 public:
  explicit Diagram(const Circuit& c) {
    std::unordered_map<Label, int> rows;
    for (const auto& w : c.inputs()) {
      int r = new_row(w.type);
      rows[w.label] = r;
      heads_.push_back(w.label.str());
    }
    draw(c, rows, columns_);
    heads_.resize(fills_.size());
    tails_.assign(fills_.size(), "");
    for (const auto& w : c.outputs()) tails_[rows.at(w.label)] = w.label.str();
  }

  std::string str() const {
    std::size_t hw = 0;
    for (const auto& h : heads_) hw = std::max(hw, display_width(h));
    std::string out;
    for (std::size_t r = 0; r < fills_.size(); ++r) {
      std::string line = heads_[r] + std::string(hw - display_width(heads_[r]), ' ') + " ";
      for (const auto& col : columns_) line += render(col, static_cast<int>(r));
      line += " " + tails_[r];
      while (!line.empty() && line.back() == ' ') line.pop_back();
      out += line + "\n";
    }
    return out;
  }

 private:
  static std::string fill_of(const WireType& t) { return t == WireType::qubit() ? "─" : "═"; }

  int new_row(const WireType& t) {
    for (std::size_t r = 0; r < fills_.size(); ++r)
      if (fills_[r].empty()) {
        fills_[r] = fill_of(t);
        return static_cast<int>(r);
      }
    fills_.push_back(fill_of(t));
    return static_cast<int>(fills_.size()) - 1;
  }

  void push(std::vector<Column>& cols, Column col, const std::vector<std::string>& before) {
    col.fill = fills_;
    for (std::size_t r = 0; r < before.size(); ++r)
      if (!before[r].empty()) col.fill[r] = before[r];
    cols.push_back(std::move(col));
  }

  void draw(const Circuit& c, std::unordered_map<Label, int>& rows, std::vector<Column>& cols) {
    for (const auto& item : c.items()) {
      auto before = fills_;
      Column col;
      std::visit(
          [&](const auto& it) {
            using T = std::decay_t<decltype(it)>;
            if constexpr (std::is_same_v<T, GateInstance>) {
              for (const auto& k : it.controls)
                col.cells[rows.at(k.label)] = Cell{k.gadget.polarity == Polarity::Black ? "●" : "○", nullptr};
              std::vector<int> in_rows;
              for (Label l : it.in) in_rows.push_back(rows.at(l));
              for (int r : in_rows) col.cells[r] = {it.name(), it.gate, it.daggered};
              std::size_t keep = std::min(it.in.size(), it.out.size());
              for (std::size_t i = keep; i < in_rows.size(); ++i) fills_[in_rows[i]].clear();
              for (std::size_t i = 0; i < it.out.size(); ++i) {
                const WireType& t = it.daggered ? it.gate->in_types[i] : it.gate->out_types[i];
                int r = i < keep ? in_rows[i] : new_row(t);
                fills_[r] = fill_of(t);
                rows[it.out[i]] = r;
                col.cells[r] = {it.name(), it.gate, it.daggered};
              }
              push(cols, std::move(col), before);
            } else if constexpr (std::is_same_v<T, PermItem>) {
              for (std::size_t i = 0; i < it.before.size(); ++i)
                if (it.before[i] != it.after[i]) col.cells[rows.at(it.before[i])] = Cell{"X", nullptr};
              push(cols, std::move(col), before);
            } else {
              draw_conj(it, rows, cols);
            }
          },
          item);
    }
  }

  void draw_conj(const ConjItem& cj, std::unordered_map<Label, int>& rows,
                 std::vector<Column>& cols) {
    std::vector<int> in_rows;
    for (Label l : cj.in) in_rows.push_back(rows.at(l));

    auto bracket = [&](const std::string& b, const std::vector<int>& rs) {
      Column col;
      for (int r : rs) col.cells[r] = Cell{b, nullptr};
      push(cols, std::move(col), fills_);
    };

    std::unordered_map<Label, int> inner;
    for (std::size_t i = 0; i < in_rows.size(); ++i) inner[cj.compute->inputs()[i].label] = in_rows[i];
    bracket("[", in_rows);
    std::vector<Column> compute_cols;
    draw(*cj.compute, inner, compute_cols);
    cols.insert(cols.end(), compute_cols.begin(), compute_cols.end());
    std::vector<int> mid_rows;
    for (const auto& w : cj.compute->outputs()) mid_rows.push_back(inner.at(w.label));
    bracket("]", mid_rows);

    std::unordered_map<Label, int> body;
    for (std::size_t i = 0; i < mid_rows.size(); ++i) body[cj.body->inputs()[i].label] = mid_rows[i];
    draw(*cj.body, body, cols);

    // The uncompute half mirrors the compute half on the same rows.
    bracket("[", mid_rows);
    for (auto it = compute_cols.rbegin(); it != compute_cols.rend(); ++it) {
      Column col = *it;
      for (auto& [r, cell] : col.cells) cell = cell.mirrored();
      cols.push_back(std::move(col));
    }
    for (int r : mid_rows)
      if (std::find(in_rows.begin(), in_rows.end(), r) == in_rows.end()) fills_[r].clear();
    for (std::size_t i = 0; i < in_rows.size(); ++i) {
      fills_[in_rows[i]] = fill_of(cj.compute->inputs()[i].type);
      rows[cj.out[i]] = in_rows[i];
    }
    bracket("]", in_rows);
  }

  static std::string render(const Column& col, int r) {
    std::size_t w = 1;
    for (const auto& [_, cell] : col.cells) w = std::max(w, display_width(cell.str()));
    int lo = col.cells.empty() ? 0 : col.cells.begin()->first;
    int hi = col.cells.empty() ? -1 : col.cells.rbegin()->first;
    bool multi = col.cells.size() > 1;
    std::string fill = static_cast<std::size_t>(r) < col.fill.size() ? col.fill[r] : "";
    std::string pad = fill.empty() ? " " : fill;
    std::string text;
    if (auto it = col.cells.find(r); it != col.cells.end()) {
      text = it->second.str();
    } else if (multi && r > lo && r < hi) {
      text = fill.empty() ? "│" : "┼";
    } else {
      return repeat(pad, w + 2);
    }
    std::size_t left = (w - display_width(text)) / 2;
    std::size_t right = w - display_width(text) - left;
    return pad + repeat(pad, left) + text + repeat(pad, right) + pad;
  }

  std::vector<std::string> fills_;
  std::vector<std::string> heads_;
  std::vector<std::string> tails_;
  std::vector<Column> columns_;
};

}  // namespace

std::string to_json(const Circuit& c, int indent) { return circuit_json(c).dump(indent); }

Circuit from_json(std::string_view text, const GateSet& gates) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    bad(e.what());
  }
  try {
    return circuit_from(j, gates);
  } catch (const json::exception& e) {
    bad(e.what());
  }
}

std::string to_ascii(const Circuit& c) { return Diagram(c).str(); }

}  // namespace pqc
