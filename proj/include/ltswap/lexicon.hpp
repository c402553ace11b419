#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

// Closed-class and common open-class English words used by the built-in
// tagger. Small by intent: unknown words fall back to context and suffix
// rules.

namespace ltswap::lexicon {

inline const std::unordered_set<std::string_view>& determiners() {
  static const std::unordered_set<std::string_view> s{
      "the", "a", "an", "this", "that", "these", "those", "each", "every", "some", "any", "no",
      "all", "both", "either", "neither", "another", "such", "my", "your", "his", "her", "its",
      "our", "their", "many", "few", "several", "much", "more", "most", "less", "least", "other",
      "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten", "whose", "what",
      "which", "first", "last", "next"};
  return s;
}

inline const std::unordered_set<std::string_view>& adjectives() {
  static const std::unordered_set<std::string_view> s{
      "good", "bad", "big", "small", "little", "old", "new", "young", "long", "short", "high", "low",
      "great", "large", "same", "different", "own", "quiet", "cold", "busy", "dark", "warm", "hot",
      "happy", "sad", "nice", "beautiful", "important", "early", "late", "full", "empty", "real",
      "whole", "free", "sure", "able", "best", "better", "worse", "worst", "tiny", "huge", "red",
      "blue", "green", "white", "black", "bright", "soft", "hard", "strong", "weak", "quick", "slow",
      "kind", "brave", "clever", "gentle", "wild", "tall", "clean", "dirty", "fresh", "serious",
      "fragile", "remote", "ready", "easy", "difficult", "simple", "strange", "famous", "rare"};
  return s;
}

inline const std::unordered_set<std::string_view>& subject_plural() {
  static const std::unordered_set<std::string_view> s{"i", "you", "we", "they"};
  return s;
}

inline const std::unordered_set<std::string_view>& subject_singular() {
  static const std::unordered_set<std::string_view> s{"he", "she", "it"};
  return s;
}

inline const std::unordered_set<std::string_view>& infinitive_markers() {
  static const std::unordered_set<std::string_view> s{
      "to", "will", "would", "shall", "should", "can", "could", "may", "might", "must",
      "do", "does", "did", "let", "lets", "please", "cannot", "not"};
  return s;
}

inline const std::unordered_set<std::string_view>& be_forms() {
  static const std::unordered_set<std::string_view> s{"am", "is", "are", "was", "were", "be", "been", "being"};
  return s;
}

inline const std::unordered_set<std::string_view>& have_forms() {
  static const std::unordered_set<std::string_view> s{"have", "has", "had", "having"};
  return s;
}

inline const std::unordered_set<std::string_view>& reflexives() {
  static const std::unordered_set<std::string_view> s{
      "myself", "yourself", "himself", "herself", "itself", "ourselves", "yourselves", "themselves"};
  return s;
}

/// Everything that is never a noun or verb candidate.
inline const std::unordered_set<std::string_view>& closed_class() {
  static const std::unordered_set<std::string_view> s = [] {
    std::unordered_set<std::string_view> out{
        // pronouns
        "i", "you", "he", "she", "it", "we", "they", "me", "him", "us", "them", "mine", "yours",
        "hers", "ours", "theirs", "someone", "something", "anyone", "anything", "everyone",
        "everything", "nobody", "nothing", "who", "whom", "somebody", "anybody", "everybody",
        // prepositions and particles
        "in", "on", "at", "by", "for", "with", "about", "against", "between", "into", "through",
        "during", "before", "after", "above", "below", "from", "up", "down", "out", "off", "over",
        "under", "of", "near", "across", "behind", "beside", "beyond", "inside", "outside", "toward",
        "towards", "upon", "within", "without", "around", "along", "among", "since", "until", "than",
        "as", "per", "via", "onto",
        // conjunctions and wh-words
        "and", "but", "or", "nor", "so", "yet", "because", "although", "though", "while", "if",
        "unless", "whether", "when", "where", "why", "how", "then", "once",
        // adverbs
        "never", "always", "often", "sometimes", "very", "too", "also", "just", "only", "even",
        "still", "already", "almost", "quite", "rather", "really", "here", "there", "now", "today",
        "yesterday", "tomorrow", "soon", "again", "ever", "perhaps", "maybe", "well", "away",
        "together", "else", "anywhere", "everywhere", "somewhere", "finally", "carefully",
        "peacefully", "quickly", "slowly",
        // numerals and interjections
        "hundred", "thousand", "million", "yes", "oh", "hello", "hi", "okay", "ok", "thanks",
        "ought", "having", "o", "s", "t", "d", "ll", "re", "ve", "m"};
    for (const auto* set : {&determiners(), &adjectives(), &infinitive_markers(), &be_forms(), &have_forms(),
                            &reflexives()})
      out.insert(set->begin(), set->end());
    return out;
  }();
  return s;
}

inline const std::unordered_set<std::string_view>& nouns() {
  static const std::unordered_set<std::string_view> s{
      "cat", "dog", "house", "man", "woman", "child", "day", "time", "year", "way", "thing", "world",
      "life", "hand", "part", "place", "case", "week", "company", "system", "program", "question",
      "government", "number", "night", "point", "home", "water", "room", "mother", "area", "money",
      "story", "fact", "month", "lot", "study", "book", "eye", "job", "word", "business", "issue",
      "side", "head", "friend", "father", "power", "hour", "game", "line", "member", "law", "car",
      "city", "community", "name", "president", "team", "minute", "idea", "kid", "body", "information",
      "parent", "face", "level", "office", "door", "health", "person", "art", "war", "history",
      "party", "result", "morning", "reason", "girl", "boy", "moment", "air", "teacher", "force",
      "education", "foot", "tooth", "mouse", "boat", "sea", "mat", "baby", "box", "bus", "city",
      "barn", "river", "market", "forest", "kitchen", "castle", "farm", "lake", "garden", "window",
      "table", "chair", "tree", "bird", "horse", "school", "street", "road", "town", "village",
      "mountain", "trail", "peak", "recipe", "basket", "misconduct", "offense", "strategist",
      "archivist", "neighbor", "medicine", "job", "windowsill", "mat", "ocean", "valley", "wolf",
      "prince", "theory", "campaign", "mayor", "cash", "mail", "stove", "chamber", "height",
      "donkey", "discussion", "chin", "description", "hammer", "bride", "porridge", "costume",
      "clock", "apple", "bread", "milk", "letter", "paper", "picture", "song", "music", "food"};
  return s;
}

inline const std::unordered_set<std::string_view>& verbs() {
  static const std::unordered_set<std::string_view> s{
      "be", "have", "do", "say", "get", "make", "go", "know", "take", "see", "come", "think", "look",
      "want", "give", "use", "find", "tell", "ask", "work", "seem", "feel", "try", "leave", "call",
      "need", "become", "put", "mean", "keep", "let", "begin", "help", "talk", "turn", "start",
      "show", "hear", "play", "run", "move", "like", "live", "believe", "hold", "bring", "happen",
      "write", "provide", "sit", "stand", "lose", "pay", "meet", "include", "continue", "set",
      "learn", "change", "lead", "understand", "watch", "follow", "stop", "create", "speak", "read",
      "allow", "add", "spend", "grow", "open", "walk", "win", "offer", "remember", "love", "consider",
      "appear", "buy", "wait", "serve", "die", "send", "expect", "build", "stay", "fall", "cut",
      "reach", "kill", "remain", "sleep", "eat", "drink", "swim", "sing", "fly", "draw", "wear",
      "catch", "teach", "carry", "analyze", "sail", "rest", "jump", "climb", "cook", "clean",
      "paint", "dance", "laugh", "cry", "smile", "push", "pull", "drive", "ride", "break", "throw",
      "surmount", "present", "prove", "trust", "choose", "rely", "handle", "slice"};
  return s;
}

/// Irregular past forms -> base.
inline const std::unordered_map<std::string_view, std::string_view>& irregular_past() {
  static const std::unordered_map<std::string_view, std::string_view> m{
      {"went", "go"},      {"saw", "see"},       {"ate", "eat"},         {"ran", "run"},
      {"took", "take"},    {"gave", "give"},     {"made", "make"},       {"came", "come"},
      {"knew", "know"},    {"thought", "think"}, {"found", "find"},      {"told", "tell"},
      {"said", "say"},     {"got", "get"},       {"slept", "sleep"},     {"wrote", "write"},
      {"sat", "sit"},      {"stood", "stand"},   {"bought", "buy"},      {"brought", "bring"},
      {"caught", "catch"}, {"taught", "teach"},  {"felt", "feel"},       {"left", "leave"},
      {"kept", "keep"},    {"began", "begin"},   {"drank", "drink"},     {"swam", "swim"},
      {"sang", "sing"},    {"flew", "fly"},      {"grew", "grow"},       {"drew", "draw"},
      {"wore", "wear"},    {"held", "hold"},     {"met", "meet"},        {"lost", "lose"},
      {"won", "win"},      {"spoke", "speak"},   {"broke", "break"},     {"drove", "drive"},
      {"rode", "ride"},    {"fell", "fall"},     {"heard", "hear"},      {"built", "build"},
      {"sent", "send"},    {"spent", "spend"},   {"paid", "pay"},        {"became", "become"},
      {"meant", "mean"},   {"led", "lead"},      {"understood", "understand"}, {"threw", "throw"},
      {"chose", "choose"}, {"did", "do"},        {"had", "have"}};
  return m;
}

inline const std::unordered_set<std::string_view>& irregular_plurals() {
  static const std::unordered_set<std::string_view> s{"men", "women", "children", "people", "feet", "teeth", "mice"};
  return s;
}

inline const std::unordered_set<std::string_view>& nominal_suffixes() {
  static const std::unordered_set<std::string_view> s{"tion", "sion", "ment", "ness", "ity", "ism", "ship", "ance",
                                                      "ence", "hood", "dom", "er", "or", "ist", "ure", "age"};
  return s;
}

}  // namespace ltswap::lexicon
