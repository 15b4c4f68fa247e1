#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace wfp::dsl {

enum class TokenKind { Ident, Number, String, Arrow, Colon, Star };

struct Token {
  TokenKind kind = TokenKind::Ident;
  std::string text;  // string tokens hold the unescaped contents
  int line = 0;
  int col = 0;  // 1-based byte column

  /// Source form: strings are re-quoted.
  std::string spelling() const;
};

struct Diagnostic {
  std::string file;
  int line = 0;
  int col = 0;
  std::string message;
  std::string token;
  std::string severity = "error";

  /// `file:line:col: error: message`
  std::string str() const;
};

/// One line: a keyword and its arguments.
struct Decl {
  Token keyword;
  std::vector<Token> args;

  std::string text() const;
};

/// `<kind> <name> [header...]` ... `end`
struct Section {
  std::string kind;
  Token keyword;
  Token name;
  std::vector<Token> header;
  std::vector<Decl> decls;

  std::string header_text() const;
};

struct Document {
  std::string file;
  std::vector<Section> sections;

  /// Positions and order are ignored.
  bool operator==(const Document& other) const;
};

struct ParseResult {
  Document doc;
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return diagnostics.empty(); }
};

/// Section kinds, in canonical order.
const std::vector<std::string>& section_kinds();

ParseResult parse(std::string_view text, const std::string& file = "");

/// Canonical text: sections by (kind, name), declarations sorted, one per
/// line, LF endings.
std::string serialize(const Document& d);
std::string serialize(const Section& s);

/// The document with sections and declarations in canonical order.
Document canonical(Document d);

bool is_identifier(std::string_view s);

}  // namespace wfp::dsl
