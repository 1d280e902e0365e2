#include "coalesce/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace coalesce {

Rat rat_parse(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("rational: empty string");
  for (char c : text) {
    if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '/' || c == '-' || c == '+'))
      throw std::invalid_argument("rational: bad character in \"" + text + "\"");
  }
  // mpq_class::set_str takes a leading '-' but not a '+'
  const std::string body = text[0] == '+' ? text.substr(1) : text;
  Rat q;
  if (body.empty() || q.set_str(body, 10) != 0)
    throw std::invalid_argument("rational: cannot parse \"" + text + "\"");
  if (q.get_den() == 0) throw std::invalid_argument("rational: zero denominator in \"" + text + "\"");
  q.canonicalize();
  return q;
}

std::string rat_str(const Rat& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

}  // namespace coalesce
