#include <cctype>

#include "silc/frontend.hpp"

namespace silc {

namespace {

std::string where(const SourceLoc& loc) {
  return loc.file + ":" + std::to_string(loc.line) + ":" + std::to_string(loc.column);
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

SyntaxError::SyntaxError(const SourceLoc& l, const std::string& msg)
    : std::runtime_error(where(l) + ": syntax error: " + msg), loc(l) {}

ResolveError::ResolveError(const SourceLoc& l, const std::string& msg)
    : std::runtime_error(where(l) + ": resolve error: " + msg), loc(l) {}

LexResult lex(const std::string& text, const std::string& filename) {
  LexResult out;
  std::size_t i = 0;
  int line = 1;
  int col = 1;

  auto here = [&] { return SourceLoc{filename, line, col, i}; };
  auto advance = [&] {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++i;
  };

  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance();
      continue;
    }
    if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
      int comment_line = line;
      std::size_t start = i + 2;
      while (i < text.size() && text[i] != '\n') advance();
      if (trim(text.substr(start, i - start)) == "@vendor") out.vendor_lines.insert(comment_line);
      continue;
    }
    if (c == '/' && i + 1 < text.size() && text[i + 1] == '*') {
      SourceLoc open = here();
      advance();
      advance();
      while (i + 1 < text.size() && !(text[i] == '*' && text[i + 1] == '/')) advance();
      if (i + 1 >= text.size()) throw SyntaxError(open, "unterminated comment");
      advance();
      advance();
      continue;
    }
    Token tok;
    tok.loc = here();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = i;
      while (i < text.size() && (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_')) advance();
      tok.kind = Token::Kind::Ident;
      tok.text = text.substr(start, i - start);
    } else if (std::isdigit(static_cast<unsigned char>(c)) ||
               (c == '-' && i + 1 < text.size() && std::isdigit(static_cast<unsigned char>(text[i + 1])))) {
      std::size_t start = i;
      advance();
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) advance();
      tok.kind = Token::Kind::Int;
      tok.text = text.substr(start, i - start);
      try {
        tok.value = std::stoll(tok.text);
      } catch (const std::out_of_range&) {
        throw SyntaxError(tok.loc, "integer literal out of range");
      }
    } else {
      static const char* two[] = {"==", "!=", "->"};
      tok.kind = Token::Kind::Punct;
      bool matched = false;
      for (const char* op : two) {
        if (text.compare(i, 2, op) == 0) {
          tok.text = op;
          advance();
          advance();
          matched = true;
          break;
        }
      }
      if (!matched) {
        static const std::string single = "(){}[];,=*";
        if (single.find(c) == std::string::npos)
          throw SyntaxError(tok.loc, std::string("unexpected character '") + c + "'");
        tok.text = std::string(1, c);
        advance();
      }
    }
    out.tokens.push_back(std::move(tok));
  }
  Token end;
  end.kind = Token::Kind::End;
  end.loc = here();
  out.tokens.push_back(end);
  return out;
}

}  // namespace silc
