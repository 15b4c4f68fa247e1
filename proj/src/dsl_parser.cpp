#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "wfp/derivation.hpp"
#include "wfp/dsl.hpp"

namespace wfp::dsl {

std::string Token::spelling() const {
  switch (kind) {
    case TokenKind::String: {
      std::string out = "\"";
      for (char c : text) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
      }
      return out + "\"";
    }
    case TokenKind::Arrow: return "->";
    case TokenKind::Colon: return ":";
    case TokenKind::Star: return "*";
    default: return text;
  }
}

std::string Diagnostic::str() const {
  std::ostringstream os;
  os << (file.empty() ? "<input>" : file) << ":" << line << ":" << col << ": " << severity << ": " << message;
  return os.str();
}

std::string Decl::text() const {
  std::string s = keyword.text;
  for (const auto& a : args) s += " " + a.spelling();
  return s;
}

std::string Section::header_text() const {
  std::string s = kind + " " + name.text;
  for (const auto& t : header) s += " " + t.spelling();
  return s;
}

const std::vector<std::string>& section_kinds() {
  static const std::vector<std::string> kinds = {"advice",  "derivation", "flow",    "instance",
                                                 "metamodel", "morphism", "process", "view"};
  return kinds;
}

bool is_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.'; });
}

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.'; }
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

class Parser {
 public:
  Parser(std::string_view text, std::string file) : text_(text), file_(std::move(file)) {}

  ParseResult run() {
    ParseResult out;
    out.doc.file = file_;
    std::optional<Section> open;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text_.size()) {
      std::size_t nl = text_.find('\n', pos);
      if (nl == std::string_view::npos) nl = text_.size();
      std::string_view line = text_.substr(pos, nl - pos);
      ++line_no;
      std::vector<Token> toks;
      int end_col = 1;
      if (lex(line, line_no, toks, end_col) && !toks.empty()) handle(toks, end_col, open, out.doc);
      if (nl == text_.size()) break;
      pos = nl + 1;
    }
    if (open) error(open->keyword, "section '" + open->name.text + "' is missing 'end'");
    check_document(out.doc);
    std::stable_sort(diags_.begin(), diags_.end(),
                     [](const auto& a, const auto& b) { return std::tie(a.line, a.col) < std::tie(b.line, b.col); });
    out.diagnostics = std::move(diags_);
    return out;
  }

 private:
  // ---- lexing --------------------------------------------------------------

  bool lex(std::string_view line, int line_no, std::vector<Token>& out, int& end_col) {
    std::size_t i = 0;
    while (i < line.size()) {
      const char c = line[i];
      const int col = static_cast<int>(i) + 1;
      if (c == ' ' || c == '\t' || c == '\r') {
        ++i;
        continue;
      }
      if (c == '#') break;
      if (ident_start(c)) {
        std::size_t j = i;
        while (j < line.size() && ident_char(line[j])) ++j;
        out.push_back({TokenKind::Ident, std::string(line.substr(i, j - i)), line_no, col});
        i = j;
      } else if (digit(c) || (c == '-' && i + 1 < line.size() && digit(line[i + 1]))) {
        std::size_t j = i + (c == '-' ? 1 : 0);
        while (j < line.size() && digit(line[j])) ++j;
        if (j + 1 < line.size() && line[j] == '.' && digit(line[j + 1])) {
          ++j;
          while (j < line.size() && digit(line[j])) ++j;
        }
        if (j < line.size() && (line[j] == 'e' || line[j] == 'E')) {
          std::size_t k = j + 1;
          if (k < line.size() && (line[k] == '+' || line[k] == '-')) ++k;
          if (k < line.size() && digit(line[k])) {
            j = k;
            while (j < line.size() && digit(line[j])) ++j;
          }
        }
        if (j < line.size() && (ident_char(line[j]) || line[j] == '-')) {
          std::size_t k = j;
          while (k < line.size() && (ident_char(line[k]) || line[k] == '-')) ++k;
          diag(line_no, col, "malformed number '" + std::string(line.substr(i, k - i)) + "'",
               std::string(line.substr(i, k - i)));
          return false;
        }
        out.push_back({TokenKind::Number, std::string(line.substr(i, j - i)), line_no, col});
        i = j;
      } else if (c == '"') {
        std::string s;
        std::size_t j = i + 1;
        bool closed = false;
        while (j < line.size()) {
          if (line[j] == '\\' && j + 1 < line.size()) {
            s += line[j + 1];
            j += 2;
            continue;
          }
          if (line[j] == '"') {
            closed = true;
            ++j;
            break;
          }
          s += line[j++];
        }
        if (!closed) {
          diag(line_no, col, "unterminated string", "\"");
          return false;
        }
        out.push_back({TokenKind::String, s, line_no, col});
        i = j;
      } else if (c == '-' && i + 1 < line.size() && line[i + 1] == '>') {
        out.push_back({TokenKind::Arrow, "->", line_no, col});
        i += 2;
      } else if (c == ':') {
        out.push_back({TokenKind::Colon, ":", line_no, col});
        ++i;
      } else if (c == '*') {
        out.push_back({TokenKind::Star, "*", line_no, col});
        ++i;
      } else {
        diag(line_no, col, "unexpected character '" + std::string(1, c) + "'", std::string(1, c));
        return false;
      }
      end_col = static_cast<int>(i) + 1;
    }
    return true;
  }

  // ---- structure -----------------------------------------------------------

  void handle(const std::vector<Token>& toks, int end_col, std::optional<Section>& open, Document& doc) {
    const Token& kw = toks.front();
    if (kw.kind != TokenKind::Ident) {
      error(kw, "expected a keyword, found '" + kw.spelling() + "'");
      return;
    }
    if (!open) {
      if (kw.text == "end") {
        error(kw, "'end' outside of a section");
        return;
      }
      const auto& kinds = section_kinds();
      if (std::find(kinds.begin(), kinds.end(), kw.text) == kinds.end()) {
        error(kw, "expected a section keyword, found '" + kw.text + "'");
        return;
      }
      Section s;
      s.kind = kw.text;
      s.keyword = kw;
      std::vector<Token> rest(toks.begin() + 1, toks.end());
      if (!match(header_pattern(s.kind), rest, kw, end_col)) return;
      s.name = rest.front();
      s.header.assign(rest.begin() + 1, rest.end());
      open = std::move(s);
      return;
    }
    if (kw.text == "end") {
      if (toks.size() > 1) error(toks[1], "unexpected '" + toks[1].spelling() + "' after 'end'");
      check_section(*open);
      doc.sections.push_back(std::move(*open));
      open.reset();
      return;
    }
    const auto& table = decl_table(open->kind);
    auto it = table.find(kw.text);
    if (it == table.end()) {
      std::string allowed;
      for (const auto& [k, _] : table) allowed += (allowed.empty() ? "" : ", ") + k;
      error(kw, "unknown keyword '" + kw.text + "' in " + open->kind + " (expected " + allowed + ")");
      return;
    }
    Decl d{kw, std::vector<Token>(toks.begin() + 1, toks.end())};
    const std::vector<std::string>& alternatives = it->second;
    const std::string* pattern = &alternatives.front();
    if (alternatives.size() > 1) {
      // Alternatives are told apart by the literal word at the same position.
      const std::size_t at = word_position(alternatives.front());
      pattern = nullptr;
      std::string words;
      for (const auto& alt : alternatives) {
        const std::string w = word_at(alt, at);
        words += (words.empty() ? "" : "|") + w;
        if (at < d.args.size() && d.args[at].kind == TokenKind::Ident && d.args[at].text == w) pattern = &alt;
      }
      if (!pattern) {
        if (at < d.args.size())
          error(d.args[at], "expected " + words + ", found '" + d.args[at].spelling() + "'");
        else
          diag(kw.line, end_col, "expected " + words, "");
        return;
      }
    }
    if (!match(*pattern, d.args, kw, end_col)) return;
    open->decls.push_back(std::move(d));
  }

  static std::string header_pattern(const std::string& kind) {
    if (kind == "view" || kind == "instance" || kind == "derivation") return "I : I";
    if (kind == "morphism") return "I I -> I";
    return "I";
  }

  static const std::map<std::string, std::vector<std::string>>& decl_table(const std::string& kind) {
    static const std::map<std::string, std::map<std::string, std::vector<std::string>>> tables = {
        {"metamodel",
         {{"class", {"I"}},
          {"vtype", {"I"}},
          {"pclass", {"I"}},
          {"port", {"I"}},
          {"assoc", {"I I -> I"}},
          {"attr", {"I I -> I"}},
          {"dataflow", {"I I -> I"}},
          {"mult", {"I E N B [as]"}},
          {"key", {"I+ [as]"}},
          {"xor", {"I I+ [as]"}},
          {"validity", {"I [as]"}},
          {"derived", {"I I+"}},
          {"derivedeq", {"I I [as]"}}}},
        {"view", {{"keep", {"I+"}}, {"drop", {"I+"}}}},
        {"morphism", {{"map", {"I I"}}}},
        {"instance", {{"obj", {"I I"}}, {"link", {"I I I [as]"}}, {"val", {"I I L [as]"}}}},
        {"process",
         {{"in", {"I I [via]"}},
          {"out", {"I I [via]"}},
          {"inner", {"I"}},
          {"row", {"Z L"}},
          {"sem",
           {"=identity", "=constant I", "=compose I I+", "=max I I I", "=threshold I I I I I", "=validity I I",
            "=custom I"}}}},
        {"flow", {{"wp", {"I I"}}, {"wire", {"I -> I [via]"}}, {"init", {"I I"}}}},
        {"advice", {{"metamodel", {"I"}}, {"entry", {"I =via I"}}, {"point", {"I I"}}}},
        {"derivation",
         {{"claim",
           {"I =mult I E N B", "I =key I+", "I =xor I I+", "I =validity I", "I =derivedeq I I", "I =all I+",
            "I =opaque S"}},
          {"step", {"N I K I+ [S]"}},
          {"top", {"I"}}}},
    };
    return tables.at(kind);
  }

  static std::vector<std::string> items(const std::string& pattern) {
    std::vector<std::string> out;
    std::istringstream is(pattern);
    for (std::string w; is >> w;) out.push_back(w);
    return out;
  }

  static std::size_t word_position(const std::string& pattern) {
    const auto it = items(pattern);
    for (std::size_t k = 0; k < it.size(); ++k)
      if (it[k][0] == '=') return k;
    return 0;
  }

  static std::string word_at(const std::string& pattern, std::size_t k) { return items(pattern).at(k).substr(1); }

  static std::string describe_item(const std::string& item) {
    switch (item[0]) {
      case 'I': return "an identifier";
      case 'N': return "a natural number";
      case 'Z': return "an integer";
      case 'L': return "a literal";
      case 'S': return "a string";
      case 'B': return "a bound (number or *)";
      case 'E': return "'src' or 'tgt'";
      case 'K': return "a step kind";
      case ':': return "':'";
      case '-': return "'->'";
      case '=': return "'" + item.substr(1) + "'";
    }
    return item;
  }

  bool fits(const std::string& item, const Token& t) const {
    switch (item[0]) {
      case 'I': return t.kind == TokenKind::Ident;
      case 'N': return t.kind == TokenKind::Number && t.text.find_first_not_of("0123456789") == std::string::npos;
      case 'Z':
        return t.kind == TokenKind::Number && t.text.find_first_not_of("0123456789", t.text[0] == '-' ? 1 : 0) ==
                                                  std::string::npos;
      case 'L':
        return t.kind == TokenKind::Number || t.kind == TokenKind::String ||
               (t.kind == TokenKind::Ident && (t.text == "true" || t.text == "false"));
      case 'S': return t.kind == TokenKind::String;
      case 'B':
        return t.kind == TokenKind::Star ||
               (t.kind == TokenKind::Number && t.text.find_first_not_of("0123456789") == std::string::npos);
      case 'E': return t.kind == TokenKind::Ident && (t.text == "src" || t.text == "tgt");
      case 'K': return t.kind == TokenKind::Ident && parse_step_kind(t.text).has_value();
      case ':': return t.kind == TokenKind::Colon;
      case '-': return t.kind == TokenKind::Arrow;
      case '=': return t.kind == TokenKind::Ident && t.text == item.substr(1);
    }
    return false;
  }

  // Checks args against a pattern. Optional groups `[as]`, `[via]` and `[S]`
  // may only close a pattern.
  bool match(const std::string& pattern, const std::vector<Token>& args, const Token& kw, int end_col) {
    const auto its = items(pattern);
    std::size_t a = 0;
    for (std::size_t k = 0; k < its.size(); ++k) {
      const std::string& item = its[k];
      if (item == "[as]" || item == "[via]") {
        const std::string word = item.substr(1, item.size() - 2);
        if (a < args.size() && args[a].kind == TokenKind::Ident && args[a].text == word) {
          if (a + 1 >= args.size()) {
            diag(kw.line, end_col, "expected an identifier after '" + word + "'", "");
            return false;
          }
          if (args[a + 1].kind != TokenKind::Ident) {
            error(args[a + 1], "expected an identifier after '" + word + "', found '" + args[a + 1].spelling() + "'");
            return false;
          }
          a += 2;
        }
        continue;
      }
      if (item == "[S]") {
        if (a < args.size() && args[a].kind == TokenKind::String) ++a;
        continue;
      }
      const bool many = item.size() > 1 && item.back() == '+';
      const std::string base = many ? item.substr(0, item.size() - 1) : item;
      if (a >= args.size()) {
        diag(kw.line, end_col, "expected " + describe_item(base), "");
        return false;
      }
      if (!fits(base, args[a])) {
        error(args[a], "expected " + describe_item(base) + ", found '" + args[a].spelling() + "'");
        return false;
      }
      ++a;
      if (many)
        while (a < args.size() && fits(base, args[a]) && !(args[a].text == "as" && k + 1 < its.size())) ++a;
    }
    if (a < args.size()) {
      error(args[a], "unexpected '" + args[a].spelling() + "'");
      return false;
    }
    return true;
  }

  // ---- intra-section checks ------------------------------------------------

  static std::optional<std::string> as_label(const Decl& d) {
    for (std::size_t k = 0; k + 1 < d.args.size(); ++k)
      if (d.args[k].kind == TokenKind::Ident && d.args[k].text == "as") return d.args[k + 1].text;
    return std::nullopt;
  }

  // Arguments before an `as` suffix.
  static std::vector<Token> plain_args(const Decl& d) {
    std::vector<Token> out;
    for (std::size_t k = 0; k < d.args.size(); ++k) {
      if (d.args[k].kind == TokenKind::Ident && d.args[k].text == "as" && k + 2 == d.args.size()) break;
      out.push_back(d.args[k]);
    }
    return out;
  }

  void check_section(const Section& s) {
    if (s.kind == "metamodel") check_metamodel(s);
    if (s.kind == "morphism") {
      std::set<std::string> seen;
      for (const auto& d : s.decls)
        if (!seen.insert(d.args[0].text).second) error(d.args[0], "'" + d.args[0].text + "' is mapped twice");
    }
    if (s.kind == "instance") check_instance(s);
    if (s.kind == "process") check_process(s);
    if (s.kind == "flow") {
      std::set<std::string> wps;
      for (const auto& d : s.decls)
        if (d.keyword.text == "wp" && !wps.insert(d.args[0].text).second)
          error(d.args[0], "duplicate work product '" + d.args[0].text + "'");
      std::set<std::string> inits;
      for (const auto& d : s.decls) {
        if (d.keyword.text != "init") continue;
        if (!wps.count(d.args[0].text)) error(d.args[0], "undeclared work product '" + d.args[0].text + "'");
        if (!inits.insert(d.args[0].text).second) error(d.args[0], "work product '" + d.args[0].text + "' initialised twice");
      }
    }
    if (s.kind == "advice") {
      once(s, "metamodel");
      once(s, "entry");
      std::set<std::string> points;
      for (const auto& d : s.decls)
        if (d.keyword.text == "point" && !points.insert(d.args[0].text).second)
          error(d.args[0], "duplicate entry point '" + d.args[0].text + "'");
    }
    if (s.kind == "derivation") check_derivation(s);
  }

  void once(const Section& s, const std::string& keyword) {
    const Decl* first = nullptr;
    for (const auto& d : s.decls) {
      if (d.keyword.text != keyword) continue;
      if (first)
        error(d.keyword, "'" + keyword + "' given twice in " + s.kind + " '" + s.name.text + "'");
      else
        first = &d;
    }
    if (!first) error(s.name, s.kind + " '" + s.name.text + "' lacks '" + keyword + "'");
  }

  void check_metamodel(const Section& s) {
    std::map<std::string, std::string> nodes;  // id -> keyword
    std::map<std::string, std::pair<std::string, std::string>> edges;
    std::map<std::string, std::vector<std::string>> derived;
    for (const auto& d : s.decls) {
      const std::string& k = d.keyword.text;
      if (k == "class" || k == "vtype" || k == "pclass" || k == "port") {
        if (!nodes.emplace(d.args[0].text, k).second) error(d.args[0], "duplicate node '" + d.args[0].text + "'");
      }
    }
    for (const auto& d : s.decls) {
      const std::string& k = d.keyword.text;
      if (k != "assoc" && k != "attr" && k != "dataflow") continue;
      bool ok = true;
      for (std::size_t j : {1u, 3u})
        if (!nodes.count(d.args[j].text)) {
          error(d.args[j], "undeclared node '" + d.args[j].text + "'");
          ok = false;
        }
      if (ok && k == "attr" && nodes[d.args[3].text] != "vtype")
        error(d.args[3], "attribute target '" + d.args[3].text + "' is not a value type");
      if (ok && k != "attr" && nodes[d.args[3].text] == "vtype")
        error(d.args[3], k + " target '" + d.args[3].text + "' is a value type; use attr");
      if (!edges.emplace(d.args[0].text, std::pair{d.args[1].text, d.args[3].text}).second)
        error(d.args[0], "duplicate edge '" + d.args[0].text + "'");
    }
    for (const auto& d : s.decls) {
      if (d.keyword.text != "derived") continue;
      const std::string& name = d.args[0].text;
      if (edges.count(name) || derived.count(name)) error(d.args[0], "duplicate edge '" + name + "'");
      std::vector<std::string> chain;
      for (std::size_t j = 1; j < d.args.size(); ++j) {
        auto it = edges.find(d.args[j].text);
        if (it == edges.end()) {
          error(d.args[j], "undeclared edge '" + d.args[j].text + "'");
          break;
        }
        if (j > 1 && edges[d.args[j - 1].text].second != it->second.first) {
          error(d.args[j], "edge '" + d.args[j].text + "' does not continue the chain");
          break;
        }
        chain.push_back(d.args[j].text);
      }
      derived[name] = chain;
    }
    std::set<std::string> ids;
    for (const auto& d : s.decls) {
      const std::string& k = d.keyword.text;
      if (k != "mult" && k != "key" && k != "xor" && k != "validity" && k != "derivedeq") continue;
      const auto args = plain_args(d);
      std::size_t refs = (k == "mult" || k == "validity") ? 1 : (k == "derivedeq" ? 2 : args.size());
      bool ok = true;
      for (std::size_t j = 0; j < refs; ++j) {
        const bool is_derived = derived.count(args[j].text) != 0;
        if (!edges.count(args[j].text) && !is_derived) {
          error(args[j], "undeclared edge '" + args[j].text + "'");
          ok = false;
        } else if (is_derived && k != "mult" && !(k == "derivedeq" && j == 0)) {
          error(args[j], "'" + args[j].text + "' is derived; only mult and derivedeq accept it");
          ok = false;
        }
      }
      if (k == "mult" && args[3].kind == TokenKind::Number && std::stoll(args[3].text) < std::stoll(args[2].text))
        error(args[3], "upper bound " + args[3].text + " is below lower bound " + args[2].text);
      if (k == "validity" && ok && edges.count(args[0].text) && nodes[edges[args[0].text].second] != "vtype")
        error(args[0], "validity needs an attribute edge");
      if (k == "derivedeq" && ok && !derived.count(args[0].text))
        error(args[0], "'" + args[0].text + "' is not a derived association");
      if ((k == "xor" || k == "key") && ok) {
        std::set<std::string> srcs;
        for (const auto& a : args) srcs.insert(edges[a.text].first);
        if (srcs.size() > 1) error(args[1], k + " edges must share a source class");
      }
      std::string id;
      if (auto label = as_label(d)) {
        id = *label;
      } else {
        id = k == "mult" ? "mult." + args[0].text + "." + args[1].text : k;
        if (k == "key" || k == "xor")
          for (const auto& a : args) id += "." + a.text;
        if (k == "validity" || k == "derivedeq") id += "." + args[0].text;
      }
      if (!ids.insert(id).second) error(d.keyword, "duplicate constraint '" + id + "'");
    }
  }

  void check_instance(const Section& s) {
    std::set<std::string> objs;
    for (const auto& d : s.decls)
      if (d.keyword.text == "obj" && !objs.insert(d.args[0].text).second)
        error(d.args[0], "duplicate object '" + d.args[0].text + "'");
    for (const auto& d : s.decls) {
      if (d.keyword.text == "link") {
        for (std::size_t j : {1u, 2u})
          if (!objs.count(d.args[j].text)) error(d.args[j], "undeclared object '" + d.args[j].text + "'");
      } else if (d.keyword.text == "val") {
        if (!objs.count(d.args[0].text)) error(d.args[0], "undeclared object '" + d.args[0].text + "'");
      }
    }
  }

  void check_process(const Section& s) {
    once(s, "inner");
    once(s, "out");
    once(s, "sem");
    std::set<std::string> ports;
    bool threshold = false;
    for (const auto& d : s.decls) {
      if (d.keyword.text == "in" && !ports.insert(d.args[0].text).second)
        error(d.args[0], "duplicate port '" + d.args[0].text + "'");
      if (d.keyword.text == "sem" && d.args[0].text == "threshold") threshold = true;
    }
    std::set<std::string> rows;
    for (const auto& d : s.decls) {
      if (d.keyword.text != "row") continue;
      if (!threshold) error(d.keyword, "'row' needs 'sem threshold'");
      if (!rows.insert(d.args[0].text).second) error(d.args[0], "duplicate row '" + d.args[0].text + "'");
    }
  }

  void check_derivation(const Section& s) {
    std::set<std::string> claims;
    for (const auto& d : s.decls)
      if (d.keyword.text == "claim" && !claims.insert(d.args[0].text).second)
        error(d.args[0], "duplicate claim '" + d.args[0].text + "'");
    auto need = [&](const Token& t) {
      if (!claims.count(t.text)) error(t, "undeclared claim '" + t.text + "'");
    };
    std::set<std::string> steps;
    for (const auto& d : s.decls) {
      if (d.keyword.text == "claim" && d.args[1].text == "all")
        for (std::size_t j = 2; j < d.args.size(); ++j) need(d.args[j]);
      if (d.keyword.text == "step") {
        if (!steps.insert(d.args[0].text).second) error(d.args[0], "duplicate step " + d.args[0].text);
        need(d.args[1]);
        for (std::size_t j = 3; j < d.args.size(); ++j)
          if (d.args[j].kind == TokenKind::Ident) need(d.args[j]);
      }
      if (d.keyword.text == "top") need(d.args[0]);
    }
    once(s, "top");
  }

  void check_document(const Document& doc) {
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& s : doc.sections) {
      const std::string group = s.kind == "view" ? "metamodel" : s.kind;
      if (!seen.insert({group, s.name.text}).second)
        error(s.name, "duplicate " + group + " '" + s.name.text + "'");
    }
  }

  // ---- diagnostics -------------------------------------------------------

  void diag(int line, int col, std::string message, std::string token) {
    diags_.push_back({file_, line, col, std::move(message), std::move(token), "error"});
  }
  void error(const Token& t, std::string message) { diag(t.line, t.col, std::move(message), t.spelling()); }

  std::string_view text_;
  std::string file_;
  std::vector<Diagnostic> diags_;
};

}  // namespace

ParseResult parse(std::string_view text, const std::string& file) { return Parser(text, file).run(); }

Document canonical(Document d) {
  for (auto& s : d.sections)
    std::stable_sort(s.decls.begin(), s.decls.end(), [](const Decl& a, const Decl& b) { return a.text() < b.text(); });
  std::stable_sort(d.sections.begin(), d.sections.end(), [](const Section& a, const Section& b) {
    return std::tie(a.kind, a.name.text) < std::tie(b.kind, b.name.text);
  });
  return d;
}

std::string serialize(const Section& s) {
  std::vector<std::string> lines;
  for (const auto& d : s.decls) lines.push_back(d.text());
  std::sort(lines.begin(), lines.end());
  std::string out = s.header_text() + "\n";
  for (const auto& l : lines) out += "  " + l + "\n";
  return out + "end\n";
}

std::string serialize(const Document& d) {
  const Document c = canonical(d);
  std::string out;
  for (std::size_t k = 0; k < c.sections.size(); ++k) out += (k ? "\n" : "") + serialize(c.sections[k]);
  return out;
}

bool Document::operator==(const Document& other) const { return serialize(*this) == serialize(other); }

}  // namespace wfp::dsl
