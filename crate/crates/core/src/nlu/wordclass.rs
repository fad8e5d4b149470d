//! Coarse classes for common English words, shared as tagger features so
//! that unseen phrasings built from familiar word types still line up.

pub(crate) fn word_class(word: &str) -> Option<&'static str> {
    let class = match word {
        "to" | "toward" | "towards" | "into" | "onto" | "for" => "TO",
        "from" | "out" | "off" => "FROM",
        "at" | "in" | "on" | "near" | "by" | "around" | "before" | "after" | "until" | "via" => {
            "AT"
        }
        "go" | "going" | "goes" | "went" | "get" | "getting" | "got" | "head" | "heading"
        | "headed" | "travel" | "traveling" | "travelling" | "ride" | "riding" | "take"
        | "taking" | "bring" | "reach" | "arrive" | "arriving" | "come" | "coming" | "walk"
        | "walking" | "visit" | "visiting" | "drop" | "meet" | "return" | "returning" => "MOVE",
        "leave" | "leaving" | "left" | "depart" | "departing" | "start" | "starting" | "begin"
        | "beginning" | "set" | "setting" | "pick" | "picked" => "LEAVE",
        "destination" | "origin" | "location" | "place" | "address" | "point" | "spot" | "stop"
        | "directions" | "route" | "way" | "trip" => "NOUN",
        "i" | "i'm" | "i'll" | "i'd" | "i've" | "me" | "my" | "we" | "we're" | "we'll" | "us"
        | "our" | "you" | "your" | "it" | "it's" => "PRON",
        "am" | "is" | "are" | "was" | "were" | "be" | "been" | "will" | "would" | "want"
        | "wants" | "need" | "needs" | "like" | "have" | "has" | "had" | "do" | "does" | "can"
        | "could" | "should" | "must" | "gotta" | "gonna" | "wanna" | "plan" | "planning"
        | "hope" | "try" => "AUX",
        "and" | "then" | "but" | "or" | "so" | "also" => "CONJ",
        "how" | "where" | "when" | "what" | "which" | "why" => "WH",
        "please" | "thanks" | "thank" | "kindly" => "POLITE",
        "the" | "a" | "an" | "this" | "that" | "some" => "DET",
        _ => return None,
    };
    Some(class)
}
