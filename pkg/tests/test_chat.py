import pytest

from sidewalk_guide.chat import (
    DialogueError,
    DialogueState,
    FALLBACK_INTENT,
    IntentPrediction,
    TokenSetClassifier,
    advance,
    default_domain,
    default_nlu_text,
    execute_action,
    next_action,
    parse_nlu,
    render_distance,
    render_report,
    serialize_nlu,
    tokenize,
)
from sidewalk_guide.chat.nlu import NluFormatError

# Shipped training corpus: 6 intents with these exact example counts and
# entity span counts per intent.
EXPECTED_SHAPE = {
    "greet": (5, 0),
    "greet_ask": (3, 0),
    "greet_normal": (3, 0),
    "find_obstacle": (8, 8),
    "find_distance": (5, 5),
    "bye": (3, 0),
}


@pytest.fixture(scope="module")
def corpus():
    return parse_nlu(default_nlu_text())


@pytest.fixture(scope="module")
def classifier(corpus):
    return TokenSetClassifier(corpus)


def test_corpus_has_exact_intent_and_example_shape(corpus):
    assert corpus.intent_names == list(EXPECTED_SHAPE)
    for intent, (n_examples, n_spans) in EXPECTED_SHAPE.items():
        examples = corpus.intents[intent]
        assert len(examples) == n_examples, intent
        assert sum(len(e.spans) for e in examples) == n_spans, intent


def test_entity_spans_strip_markup():
    data = parse_nlu("## intent:find_obstacle\n- Find [obstacle](obstacle)?\n")
    ex = data.intents["find_obstacle"][0]
    assert ex.text == "Find obstacle?"
    assert len(ex.spans) == 1
    assert ex.spans[0].surface == "obstacle"
    assert ex.spans[0].entity == "obstacle"
    assert ex.spans[0].start == 5


def test_spaced_span_markup_is_tolerated():
    data = parse_nlu("## intent:x\n- What is [that] (obstacle)?\n")
    ex = data.intents["x"][0]
    assert ex.text == "What is that?"
    assert ex.spans[0].surface == "that"
    assert ex.spans[0].entity == "obstacle"


def test_every_corpus_entity_is_obstacle_or_distance(corpus):
    entities = {s.entity for exs in corpus.intents.values() for e in exs for s in e.spans}
    assert entities == {"obstacle", "distance"}


def test_parse_errors():
    with pytest.raises(NluFormatError, match="no intents"):
        parse_nlu("")
    with pytest.raises(NluFormatError, match="no intents"):
        parse_nlu("\n\n")
    with pytest.raises(NluFormatError, match="before any intent"):
        parse_nlu("- hello\n## intent:greet\n")
    with pytest.raises(NluFormatError, match="duplicate"):
        parse_nlu("## intent:a\n- x\n## intent:a\n- y\n")
    with pytest.raises(NluFormatError, match="unbalanced"):
        parse_nlu("## intent:a\n- hello [there(obstacle)\n")


def test_serialize_roundtrip_preserves_structure(corpus):
    again = parse_nlu(serialize_nlu(corpus))
    assert again.intent_names == corpus.intent_names
    for name in corpus.intents:
        orig = corpus.intents[name]
        back = again.intents[name]
        assert [e.text for e in back] == [e.text for e in orig]
        assert [[(s.surface, s.entity, s.start) for s in e.spans] for e in back] == \
               [[(s.surface, s.entity, s.start) for s in e.spans] for e in orig]


def test_hello_classifies_as_greet(classifier):
    assert classifier.classify("hello").intent == "greet"


def test_how_far_classifies_as_find_distance(classifier):
    pred = classifier.classify("How far?")
    assert pred.intent == "find_distance"
    assert pred.entities.get("distance") == "far"


def test_resubstitution_accuracy_is_total(corpus, classifier):
    for intent, examples in corpus.intents.items():
        for ex in examples:
            pred = classifier.classify(ex.text)
            assert pred.intent == intent, (intent, ex.text, pred)
            assert pred.confidence == pytest.approx(1.0)


def test_classification_is_case_insensitive(corpus, classifier):
    for intent, examples in corpus.intents.items():
        for ex in examples:
            assert classifier.classify(ex.text.upper()).intent == \
                   classifier.classify(ex.text).intent


def test_gibberish_falls_back(classifier):
    pred = classifier.classify("flibbertigibbet")
    assert pred.intent == FALLBACK_INTENT
    assert pred.confidence < 0.4


def test_empty_utterance_falls_back_with_zero_confidence(classifier):
    pred = classifier.classify("")
    assert pred.intent == FALLBACK_INTENT
    assert pred.confidence == 0.0


def test_entity_extraction_from_user_words(classifier):
    pred = classifier.classify("What is there?")
    assert pred.intent == "find_obstacle"
    assert pred.entities == {"obstacle": "there"}


def test_tokenizer_strips_punctuation_and_lowercases():
    assert tokenize("Ready, want to start?.") == ["ready", "want", "to", "start"]


# ---------------------------------------------------------------------------
# dialogue policy
# ---------------------------------------------------------------------------

def fresh_state():
    return DialogueState(session_id="t")


def test_fresh_greet_yields_utter_greet():
    domain = default_domain()
    action = next_action(fresh_state(), IntentPrediction("greet", 1.0), domain)
    assert action == "utter_greet"


def test_find_obstacle_yields_report_action():
    domain = default_domain()
    action = next_action(fresh_state(), IntentPrediction("find_obstacle", 1.0), domain)
    assert action == "action_report_obstacles"


def test_fallback_intent_yields_fallback_action():
    domain = default_domain()
    action = next_action(fresh_state(), IntentPrediction(FALLBACK_INTENT, 0.0), domain)
    assert action == "utter_fallback"


def test_undeclared_intent_raises():
    domain = default_domain()
    with pytest.raises(DialogueError):
        next_action(fresh_state(), IntentPrediction("order_pizza", 1.0), domain)


def test_story_prefix_matching_follows_the_longest_story():
    domain = default_domain()
    state = fresh_state()
    transcript = [("greet", "utter_greet"), ("greet_ask", "utter_ready"),
                  ("greet_normal", "utter_ready"),
                  ("find_obstacle", "action_report_obstacles"),
                  ("find_distance", "action_report_distance"),
                  ("bye", "utter_bye")]
    for intent, expected in transcript:
        pred = IntentPrediction(intent, 1.0)
        action = next_action(state, pred, domain)
        assert action == expected, (intent, action)
        advance(state, pred, action, domain)


def test_next_action_is_pure_function_of_history():
    domain = default_domain()
    intents = ["greet", "find_obstacle", "find_distance", "find_obstacle", "bye"]

    def run():
        state = fresh_state()
        actions = []
        for name in intents:
            pred = IntentPrediction(name, 1.0)
            a = next_action(state, pred, domain)
            actions.append(a)
            advance(state, pred, a, domain)
        return actions

    assert run() == run()


def test_slots_keep_only_declared_entities():
    domain = default_domain()
    state = fresh_state()
    pred = IntentPrediction("find_obstacle", 1.0,
                            {"obstacle": "there", "bogus": "x"})
    advance(state, pred, "action_report_obstacles", domain)
    assert state.slots == {"obstacle": "there"}
    assert state.turn_count == 1


# ---------------------------------------------------------------------------
# actions / rendering
# ---------------------------------------------------------------------------

def test_report_rendering_single_cluster():
    text = render_report([("fire_hydrant", 3.0, "ahead")],
                         "I see {kind} {distance} meters {bearing_word}")
    assert text == "I see fire hydrant 3.0 meters ahead"


def test_report_rendering_empty_is_free_path():
    assert render_report([], "I see {kind} {distance} meters {bearing_word}") == \
        "the path ahead is free"


def test_distance_close_and_far():
    assert render_distance([("tree", 1.4, "ahead")]) == "yes, about 1.4 meters, close"
    assert render_distance([("tree", 6.0, "left")]) == "about 6.0 meters away"
    assert render_distance(None) == "I have not spotted anything yet"
    assert render_distance([]) == "I have not spotted anything yet"


def test_distance_prefers_asked_label():
    report = [("tree", 1.0, "ahead"), ("fire_hydrant", 4.0, "left")]
    assert render_distance(report, "fire hydrant") == "about 4.0 meters away"


def test_execute_action_report_uses_fresh_report():
    domain = default_domain()
    report = [("dumpster", 2.5, "left"), ("tree", 4.0, "right")]
    text, remembered = execute_action(
        "action_report_obstacles", fresh_state(),
        IntentPrediction("find_obstacle", 1.0), domain,
        fresh_report=lambda: report, last_report=None)
    assert text == "I see dumpster 2.5 meters left; I see tree 4.0 meters right"
    assert remembered == report


def test_execute_action_distance_uses_last_report():
    domain = default_domain()
    text, _ = execute_action(
        "action_report_distance", fresh_state(),
        IntentPrediction("find_distance", 1.0), domain,
        fresh_report=lambda: [], last_report=[("tree", 1.2, "ahead")])
    assert text == "yes, about 1.2 meters, close"


def test_no_template_placeholder_survives_rendering():
    domain = default_domain()
    report = [("electric_scooter", 2.0, "right")]
    for action in domain.actions:
        text, _ = execute_action(action, fresh_state(),
                                 IntentPrediction("greet", 1.0), domain,
                                 fresh_report=lambda: report,
                                 last_report=report)
        assert "{" not in text and "}" not in text, (action, text)
