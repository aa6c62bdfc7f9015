#include "support/synthetic.hpp"

#include <algorithm>

namespace fincat::testing {
namespace {

const std::vector<std::string> kFiller = {
    "the",      "company",   "revenue",  "grew",      "reported", "quarter",   "margin",
    "net",      "income",    "sales",    "of",        "in",       "to",        "and",
    "a",        "for",       "year",     "segment",   "growth",   "operating", "costs",
    "shares",   "dividend",  "from",     "with",      "fiscal",   "earnings",  "per",
    "share",    "compared",  "guidance", "was",       "were",     "by",        "cash",
    "flow",     "billion",   "million",  "percent",   "higher",   "lower",     "versus",
    "prior",    "period",    "board",    "approved",  "debt",     "ratio",     "at",
    "retail",   "volume",    "price",    "outlook",   "results",  "on",        "basis"};

const std::vector<std::string> kPunctuation = {",", ".", "-", "(", ")", "&", "%", "$"};

std::string random_numeral(Rng& rng) {
  switch (rng.below(8)) {
    case 0:
      return std::to_string(rng.below(100)) + "%";
    case 1:
      return "$" + std::to_string(rng.below(50)) + "." + std::to_string(rng.below(10));
    case 2:
      return std::to_string(2000 + rng.below(30));
    case 3:
      return "Q" + std::to_string(1 + rng.below(4));
    case 4:
      return "FY" + std::to_string(2015 + rng.below(12));
    case 5:
      return std::to_string(1 + rng.below(9)) + "," + std::to_string(100 + rng.below(900));
    case 6:
      return std::to_string(rng.below(1000));
    default:
      return std::to_string(rng.below(20)) + "." + std::to_string(rng.below(100)) + "x";
  }
}

}  // namespace

std::string random_text(Rng& rng, std::size_t max_words) {
  static const std::vector<std::string> kSeparators = {" ", " ", " ", "  ", "\t", "\n",
                                                       " \r\n", "\xC2\xA0", "\xE3\x80\x80"};
  static const std::vector<std::string> kExotic = {"\xEF\xBC\x91\xEF\xBC\x92",  // full-width 12
                                                   "\xD9\xA3%",                 // Arabic-Indic 3
                                                   "caf\xC3\xA9", "\xE2\x82\xAC" "5",
                                                   "na\xC3\xAFve"};
  std::string text;
  if (rng.coin(0.2)) text += rng.pick(kSeparators);
  const std::size_t words = rng.below(max_words + 1);
  for (std::size_t i = 0; i < words; ++i) {
    if (i > 0) text += rng.pick(kSeparators);
    const auto kind = rng.below(10);
    if (kind < 5) {
      text += rng.pick(kFiller);
    } else if (kind < 8) {
      text += random_numeral(rng);
    } else if (kind < 9) {
      text += rng.pick(kPunctuation) + rng.pick(kFiller) + rng.pick(kPunctuation);
    } else {
      text += rng.pick(kExotic);
    }
  }
  if (rng.coin(0.2)) text += rng.pick(kSeparators);
  return text;
}

std::vector<DatasetRecord> synthetic_corpus(std::size_t n, std::uint64_t seed, int k,
                                            const std::string& id_prefix) {
  Rng rng(seed);
  std::vector<DatasetRecord> out;
  out.reserve(n);
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t length = 12 + rng.below(13);
    std::vector<std::string> words(length);
    for (auto& w : words) w = rng.pick(kFiller);

    const std::size_t target = rng.below(length);
    words[target] = random_numeral(rng);
    if (rng.coin(0.5)) {
      std::size_t other = rng.below(length);
      if (other != target) words[other] = random_numeral(rng);
    }
    const std::size_t keywords = rng.below(3);
    std::vector<std::size_t> keyword_pos;
    for (std::size_t i = 0; i < keywords; ++i) {
      const std::size_t pos = rng.below(length);
      if (pos == target) continue;
      words[pos] = rng.pick(kForwardKeywords);
      keyword_pos.push_back(pos);
    }

    bool in_claim = false;
    for (std::size_t i = 0; i < length; ++i) {
      const bool is_keyword = std::find(kForwardKeywords.begin(), kForwardKeywords.end(),
                                        words[i]) != kForwardKeywords.end();
      const auto dist = i > target ? i - target : target - i;
      if (is_keyword && dist <= static_cast<std::size_t>(k)) in_claim = true;
    }

    DatasetRecord rec;
    rec.record_id = id_prefix + "-" + std::to_string(r);
    std::size_t start = 0;
    for (std::size_t i = 0; i < length; ++i) {
      if (i > 0) rec.paragraph += ' ';
      if (i == target) start = rec.paragraph.size();
      rec.paragraph += words[i];
    }
    rec.target_offset_start = start;
    rec.target_offset_end = start + words[target].size();
    rec.label = in_claim ? ClaimLabel::kInClaim : ClaimLabel::kOutOfClaim;
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace fincat::testing
