"""Author the recorded fixture suite that the integration tests replay.

Run from the repository root after an editable install:

    python3 scripts/build_fixture_suite.py

The script wipes src/factpipe/data/fixture_suite/ and regenerates it from
the world table below: a 25-claim labeled dataset, a linker dictionary,
recorded SPARQL result sets, recorded web-search results, recorded chat
completions, and golden verification results. It finishes by replaying
every claim through the ordinary fixture wiring and insisting the replayed
results match the goldens exactly.

Authoring uses a scripted stand-in for the chat model: each claim carries
the verdict the model should hand back, and the stand-in locates the
evidence line it must cite at response time, so citations stay correct
even when ranking shuffles the list.
"""

from __future__ import annotations

import json
import re
import shutil
from dataclasses import dataclass, field
from pathlib import Path

from factpipe.backends.chat import RecordingChatBackend
from factpipe.backends.search import FixtureSearchBackend
from factpipe.backends.sparql import RecordedSparqlTransport
from factpipe.domain import Claim, Direction, RdfTerm, Stage, Triple, parse_label
from factpipe.entity_linking import DictionaryLinker, sameas_query
from factpipe.evaluation import load_fever_jsonl
from factpipe.fixtures import one_hop_results, sameas_results
from factpipe.kg_retrieval import PredicateBlacklist, SparqlTripleSource, one_hop_query
from factpipe.orchestrator import Pipeline, PipelineConfig, build_pipeline
from factpipe.ranking import LexicalOverlapScorer
from factpipe.web_fallback import Snippet

SUITE = Path(__file__).resolve().parent.parent / "src" / "factpipe" / "data" / "fixture_suite"

RES = "http://dbpedia.org/resource/"
ONT = "http://dbpedia.org/ontology/"
PROP = "http://dbpedia.org/property/"
WIKIDATA = "http://www.wikidata.org/entity/"
RDFS_LABEL = "http://www.w3.org/2000/01/rdf-schema#label"
RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"
OWL_SAMEAS = "http://www.w3.org/2002/07/owl#sameAs"
DCT_SUBJECT = "http://purl.org/dc/terms/subject"
FOAF_DEPICTION = "http://xmlns.com/foaf/0.1/depiction"
XSD = "http://www.w3.org/2001/XMLSchema#"


def rel(subject: str, predicate: str, obj: str, *, inbound: bool = False) -> Triple:
    """Resource-to-resource arc; inbound puts the fixture entity in object position."""
    direction = Direction.ENTITY_AS_OBJECT if inbound else Direction.ENTITY_AS_SUBJECT
    return Triple(
        subject=RES + subject,
        predicate=predicate,
        object=RdfTerm(value=RES + obj),
        direction=direction,
    )


def lit(subject: str, predicate: str, text: str, *, lang: str | None = None, datatype: str | None = None) -> Triple:
    return Triple(
        subject=RES + subject,
        predicate=predicate,
        object=RdfTerm(value=text, is_literal=True, lang=lang, datatype=datatype),
        direction=Direction.ENTITY_AS_SUBJECT,
    )


def bookkeeping(name: str, label: str, *wikilinks: str) -> list[Triple]:
    """The junk every DBpedia resource drags along.

    The wiki links, category, depiction, and sameAs arcs must die in the
    predicate blacklist; the German label must die in the language filter;
    only the English label survives to the ranker.
    """
    rows = [
        lit(name, RDFS_LABEL, label, lang="en"),
        lit(name, RDFS_LABEL, label, lang="de"),
        rel(name, DCT_SUBJECT, f"Category:{name}"),
        rel(name, FOAF_DEPICTION, f"Special:FilePath/{name}.jpg"),
        Triple(
            subject=RES + name,
            predicate=OWL_SAMEAS,
            object=RdfTerm(value=WIKIDATA + "Q0"),
            direction=Direction.ENTITY_AS_SUBJECT,
        ),
    ]
    for target in wikilinks:
        rows.append(rel(name, ONT + "wikiPageWikiLink", target))
        rows.append(rel(target, ONT + "wikiPageWikiLink", name, inbound=True))
    return rows


BNODE_ROW = {
    "s": {"type": "bnode", "value": "b0"},
    "p": {"type": "uri", "value": ONT + "owner"},
    "o": {"type": "uri", "value": RES + "Amazon_(company)"},
    "dir": {"type": "literal", "value": "in"},
}


def hits(*rows: tuple[str, str, str]) -> list[Snippet]:
    """Snippets in engine order from (title, url, text) rows."""
    return [Snippet(text=text, title=title, url=url, rank=i) for i, (title, url, text) in enumerate(rows)]


@dataclass(frozen=True)
class Answer:
    """What the scripted model should say; {n} in reason becomes the cited line number."""

    label: str
    reason: str
    cite: str | None = None


@dataclass(frozen=True)
class WebPlan:
    queries: tuple[str, ...]
    results: dict[str, list[Snippet]]
    answer: Answer


@dataclass(frozen=True)
class ClaimPlan:
    id: str
    text: str
    gold: str  # FEVER spelling, as benchmark files use
    entities: tuple[tuple[str, str, str | None], ...] = ()  # surface, qid, iri (None -> sameAs bridge)
    sameas: dict[str, str] = field(default_factory=dict)  # qid -> bridged IRI
    graph: dict[str, tuple[list[Triple], list[dict]]] = field(default_factory=dict)
    kg_answer: Answer | None = None
    web: WebPlan | None = None


NYPOST_SNIPPET = (
    "Eric Trump, the second son of President-Elect Donald Trump, told The Post "
    "this week his father has a long to-do list ready for his White"
)

BLACK_MIRROR_ABSTRACT = (
    "Black Mirror is a British anthology television series created by Charlie Brooker. "
    "Episodes explore a high-tech near-future and the dark side of modern society, "
    "with science fiction themes throughout."
)

VENUS_ABSTRACT = (
    "Venus is the second planet from the Sun. It is a terrestrial planet "
    "sometimes called Earth's sister planet."
)


WORLD: tuple[ClaimPlan, ...] = (
    ClaimPlan(
        id="f001",
        text="Eric Trump's father is banned from ever becoming president.",
        gold="REFUTES",
        entities=(("Eric Trump", "Q3731533", RES + "Eric_Trump"),),
        graph={
            RES + "Eric_Trump": (
                [
                    rel("Eric_Trump", ONT + "parent", "Donald_Trump"),
                    rel("Eric_Trump", ONT + "birthPlace", "Manhattan"),
                    lit("Eric_Trump", ONT + "birthDate", "1984-01-06", datatype=XSD + "date"),
                    rel("Eric_Trump", ONT + "employer", "The_Trump_Organization"),
                ]
                + bookkeeping("Eric_Trump", "Eric Trump", "Donald_Trump", "New_York_City"),
                [],
            ),
        },
        kg_answer=Answer(
            label="Not Enough Info",
            reason="The paths describe family relations but say nothing about a ban from the presidency.",
        ),
        web=WebPlan(
            queries=(
                "eric trump father banned from becoming president",
                "donald trump eligible to run for president",
                "trump banned presidency",
            ),
            results={
                "eric trump father banned from becoming president": hits(
                    (
                        "Is Trump barred from office?",
                        "https://www.factcheck.org/2024/trump-eligibility/",
                        "Donald Trump is not banned from becoming president despite two impeachments.",
                    ),
                    (
                        "Eric Trump on his father's plans",
                        "https://nypost.com/2024/11/10/us-news/eric-trump-on-his-fathers-plans/",
                        NYPOST_SNIPPET,
                    ),
                    (
                        "Twenty-Second Amendment",
                        "https://constitution.congress.gov/browse/amendment-22/",
                        "The 22nd Amendment limits a president to two elected terms in office.",
                    ),
                ),
                "donald trump eligible to run for president": hits(
                    (
                        "Explainer: Trump's ballot eligibility",
                        "https://www.reuters.com/legal/trump-eligibility-explainer/",
                        "Legal experts say Donald Trump remains eligible to run for the presidency.",
                    ),
                    (
                        "Eric Trump on his father's plans",
                        "https://nypost.com/2024/11/10/us-news/eric-trump-on-his-fathers-plans/",
                        NYPOST_SNIPPET,
                    ),
                ),
                "trump banned presidency": hits(
                    (
                        "Impeachment history",
                        "https://apnews.com/hub/impeachment-history",
                        "A history of impeachment proceedings in the United States Congress.",
                    ),
                    (
                        "Campaign finance tracker",
                        "https://ballotpedia.org/campaign-finance-2024",
                        "Campaign finance filings show record fundraising totals for the quarter.",
                    ),
                ),
            },
            answer=Answer(
                label="Refuted",
                reason="Snippet {n} indicates Donald Trump is a President-Elect, so he is eligible to become president.",
                cite="President-Elect Donald Trump",
            ),
        ),
    ),
    ClaimPlan(
        id="f002",
        text="Black Mirror is a British science fiction television series about modern society.",
        gold="SUPPORTS",
        entities=(("Black Mirror", "Q23572", RES + "Black_Mirror"),),
        graph={
            RES + "Black_Mirror": (
                [
                    lit("Black_Mirror", ONT + "abstract", BLACK_MIRROR_ABSTRACT, lang="en"),
                    lit("Black_Mirror", ONT + "abstract", "Black Mirror ist eine britische Serie.", lang="de"),
                    rel("Black_Mirror", ONT + "genre", "Science_fiction"),
                    rel("Black_Mirror", ONT + "creator", "Charlie_Brooker"),
                    rel("Black_Mirror", ONT + "channel", "Netflix"),
                    lit("Black_Mirror", PROP + "numOfSeries", "6", datatype=XSD + "integer"),
                ]
                + bookkeeping("Black_Mirror", "Black Mirror", "Charlie_Brooker", "Netflix"),
                [],
            ),
        },
        kg_answer=Answer(
            label="Supported",
            reason=(
                "Path {n} confirms Black Mirror is a British anthology television series "
                "exploring science fiction themes about modern society."
            ),
            cite="anthology television series",
        ),
    ),
    ClaimPlan(
        id="f003",
        text="Arya Stark was created by George R. R. Martin.",
        gold="SUPPORTS",
        entities=(
            ("Arya Stark", "Q3659892", RES + "Arya_Stark"),
            ("George R. R. Martin", "Q181677", RES + "George_R._R._Martin"),
        ),
        graph={
            RES + "Arya_Stark": (
                [
                    rel("Arya_Stark", ONT + "creator", "George_R._R._Martin"),
                    rel("Arya_Stark", ONT + "series", "A_Song_of_Ice_and_Fire"),
                    rel("Arya_Stark", ONT + "portrayer", "Maisie_Williams"),
                    rel("Arya_Stark", ONT + "family", "House_Stark"),
                ]
                + bookkeeping("Arya_Stark", "Arya Stark", "Game_of_Thrones"),
                [],
            ),
            RES + "George_R._R._Martin": (
                [
                    # Same arc as above, seen from the other end; retrieval must
                    # collapse the two into one candidate.
                    rel("Arya_Stark", ONT + "creator", "George_R._R._Martin", inbound=True),
                    rel("George_R._R._Martin", ONT + "birthPlace", "Bayonne,_New_Jersey"),
                    rel("George_R._R._Martin", ONT + "notableWork", "A_Game_of_Thrones"),
                    rel("George_R._R._Martin", ONT + "occupation", "Novelist"),
                ]
                + bookkeeping("George_R._R._Martin", "George R. R. Martin", "A_Song_of_Ice_and_Fire"),
                [],
            ),
        },
        kg_answer=Answer(
            label="Supported",
            reason="Path {n} directly records creator George R. R. Martin for Arya Stark.",
            cite="creator -> George_R._R._Martin",
        ),
    ),
    ClaimPlan(
        id="f004",
        text="Barack Obama was born in Honolulu.",
        gold="SUPPORTS",
        # No IRI in the dictionary: resolution must take the sameAs bridge.
        entities=(("Barack Obama", "Q76", None),),
        sameas={"Q76": RES + "Barack_Obama"},
        graph={
            RES + "Barack_Obama": (
                [
                    rel("Barack_Obama", ONT + "birthPlace", "Honolulu"),
                    lit("Barack_Obama", ONT + "birthDate", "1961-08-04", datatype=XSD + "date"),
                    rel("Barack_Obama", ONT + "party", "Democratic_Party_(United_States)"),
                    rel("Barack_Obama", ONT + "spouse", "Michelle_Obama"),
                ]
                + bookkeeping("Barack_Obama", "Barack Obama", "President_of_the_United_States"),
                [],
            ),
        },
        kg_answer=Answer(
            label="Supported",
            reason="Path {n} records Honolulu as the birthplace.",
            cite="birthPlace -> Honolulu",
        ),
    ),
    ClaimPlan(
        id="f005",
        text="The Eiffel Tower is located in Berlin.",
        gold="REFUTES",
        entities=(("Eiffel Tower", "Q243", RES + "Eiffel_Tower"),),
        graph={
            RES + "Eiffel_Tower": (
                [
                    rel("Eiffel_Tower", ONT + "location", "Paris"),
                    rel("Eiffel_Tower", ONT + "architect", "Stephen_Sauvestre"),
                    lit("Eiffel_Tower", ONT + "floorCount", "3", datatype=XSD + "integer"),
                ]
                + bookkeeping("Eiffel_Tower", "Eiffel Tower", "Paris"),
                [],
            ),
        },
        kg_answer=Answer(
            label="Refuted",
            reason="Path {n} places the Eiffel Tower in Paris, not Berlin.",
            cite="location -> Paris",
        ),
    ),
    ClaimPlan(
        id="f006",
        text="The Great Gatsby was written by F. Scott Fitzgerald.",
        gold="SUPPORTS",
        entities=(("The Great Gatsby", "Q93184", RES + "The_Great_Gatsby"),),
        graph={
            RES + "The_Great_Gatsby": (
                [
                    rel("The_Great_Gatsby", ONT + "author", "F._Scott_Fitzgerald"),
                    lit("The_Great_Gatsby", ONT + "releaseDate", "1925-04-10", datatype=XSD + "date"),
                    rel("The_Great_Gatsby", ONT + "country", "United_States"),
                    rel("The_Great_Gatsby", ONT + "literaryGenre", "Tragedy"),
                ]
                + bookkeeping("The_Great_Gatsby", "The Great Gatsby", "F._Scott_Fitzgerald"),
                [],
            ),
        },
        kg_answer=Answer(
            label="Supported",
            reason="Path {n} names F. Scott Fitzgerald as the author.",
            cite="author -> F._Scott_Fitzgerald",
        ),
    ),
    ClaimPlan(
        id="f007",
        text="Titanic was directed by Steven Spielberg.",
        gold="REFUTES",
        entities=(("Titanic", "Q44578", RES + "Titanic_(1997_film)"),),
        graph={
            RES + "Titanic_(1997_film)": (
                [
                    rel("Titanic_(1997_film)", ONT + "director", "James_Cameron"),
                    rel("Titanic_(1997_film)", ONT + "starring", "Leonardo_DiCaprio"),
                    rel("Titanic_(1997_film)", ONT + "musicComposer", "James_Horner"),
                ]
                + bookkeeping("Titanic_(1997_film)", "Titanic (1997 film)", "James_Cameron"),
                [],
            ),
        },
        kg_answer=Answer(
            label="Refuted",
            reason="Path {n} records James Cameron as the director, not Steven Spielberg.",
            cite="director -> James_Cameron",
        ),
    ),
    ClaimPlan(
        id="f008",
        text="Amazon was founded by Jeff Bezos.",
        gold="SUPPORTS",
        entities=(("Amazon", "Q3884", RES + "Amazon_(company)"),),
        graph={
            RES + "Amazon_(company)": (
                [
                    rel("Amazon_(company)", ONT + "foundedBy", "Jeff_Bezos"),
                    # Duplicate row; the endpoint really does this and retrieval
                    # must keep only the first copy.
                    rel("Amazon_(company)", ONT + "foundedBy", "Jeff_Bezos"),
                    lit("Amazon_(company)", ONT + "foundingDate", "1994-07-05", datatype=XSD + "date"),
                    rel("Amazon_(company)", ONT + "industry", "E-commerce"),
                    rel("Amazon_(company)", ONT + "locationCity", "Seattle"),
                ]
                + bookkeeping("Amazon_(company)", "Amazon (company)", "Jeff_Bezos"),
                [BNODE_ROW],
            ),
        },
        kg_answer=Answer(
            label="Supported",
            reason="Path {n} lists Jeff Bezos as the founder.",
            cite="foundedBy -> Jeff_Bezos",
        ),
    ),
    ClaimPlan(
        id="f009",
        text="Canberra is the capital of New Zealand.",
        gold="REFUTES",
        entities=(("Canberra", "Q3114", RES + "Canberra"),),
        graph={
            RES + "Canberra": (
                [
                    rel("Australia", ONT + "capital", "Canberra", inbound=True),
                    rel("Canberra", ONT + "country", "Australia"),
                    lit("Canberra", ONT + "populationTotal", "453558", datatype=XSD + "integer"),
                ]
                + bookkeeping("Canberra", "Canberra", "Australia"),
                [],
            ),
        },
        kg_answer=Answer(
            label="Refuted",
            reason="Path {n} shows Canberra is the capital of Australia, not New Zealand.",
            cite="Australia -> capital -> Canberra",
        ),
    ),
    ClaimPlan(
        id="f010",
        text="Nintendo was founded in 1889.",
        gold="SUPPORTS",
        entities=(("Nintendo", "Q8093", RES + "Nintendo"),),
        graph={
            RES + "Nintendo": (
                [
                    lit("Nintendo", ONT + "foundingYear", "1889", datatype=XSD + "gYear"),
                    rel("Nintendo", ONT + "foundationPlace", "Kyoto"),
                    rel("Nintendo", ONT + "industry", "Video_game_industry"),
                    rel("Nintendo", ONT + "founder", "Fusajiro_Yamauchi"),
                ]
                + bookkeeping("Nintendo", "Nintendo", "Kyoto"),
                [],
            ),
        },
        kg_answer=Answer(
            label="Supported",
            reason="Path {n} gives 1889 as the founding year.",
            cite="foundingYear -> 1889",
        ),
    ),
    ClaimPlan(
        id="f011",
        text="Venus is the second planet from the Sun.",
        gold="SUPPORTS",
        entities=(("Venus", "Q313", RES + "Venus"),),
        graph={
            RES + "Venus": (
                [
                    lit("Venus", ONT + "abstract", VENUS_ABSTRACT, lang="en"),
                    lit("Venus", ONT + "abstract", "Venus ist der zweite Planet.", lang="de"),
                    rel("Venus", RDF_TYPE, "Planet"),
                    lit("Venus", PROP + "orbitalPeriod", "224.7", datatype=XSD + "double"),
                ]
                + bookkeeping("Venus", "Venus", "Solar_System"),
                [],
            ),
        },
        kg_answer=Answer(
            label="Supported",
            reason="Path {n} states Venus is the second planet from the Sun.",
            cite="second planet from the Sun",
        ),
    ),
    ClaimPlan(
        id="f012",
        text="Albert Einstein was born in Vienna.",
        gold="REFUTES",
        entities=(("Albert Einstein", "Q937", RES + "Albert_Einstein"),),
        graph={
            RES + "Albert_Einstein": (
                [
                    rel("Albert_Einstein", ONT + "birthPlace", "Ulm"),
                    rel("Albert_Einstein", ONT + "birthPlace", "Ulm"),
                    rel("Albert_Einstein", ONT + "field", "Physics"),
                    rel("Albert_Einstein", ONT + "award", "Nobel_Prize_in_Physics"),
                    rel("Albert_Einstein", ONT + "citizenship", "Switzerland"),
                ]
                + bookkeeping("Albert_Einstein", "Albert Einstein", "Physics"),
                [],
            ),
        },
        kg_answer=Answer(
            label="Refuted",
            reason="Path {n} gives Ulm as the birthplace, not Vienna.",
            cite="birthPlace -> Ulm",
        ),
    ),
    ClaimPlan(
        id="f013",
        text="Python was created by Guido van Rossum.",
        gold="SUPPORTS",
        entities=(("Python", "Q28865", RES + "Python_(programming_language)"),),
        graph={
            RES + "Python_(programming_language)": (
                [
                    rel("Python_(programming_language)", ONT + "designer", "Guido_van_Rossum"),
                    rel("Python_(programming_language)", ONT + "paradigm", "Object-oriented_programming"),
                    rel("Python_(programming_language)", ONT + "influencedBy", "ABC_(programming_language)"),
                ]
                + bookkeeping("Python_(programming_language)", "Python (programming language)", "Guido_van_Rossum"),
                [],
            ),
        },
        kg_answer=Answer(
            label="Supported",
            reason="Path {n} credits Guido van Rossum as the designer.",
            cite="designer -> Guido_van_Rossum",
        ),
    ),
    ClaimPlan(
        id="f014",
        text="The Louvre is located in London.",
        gold="REFUTES",
        entities=(("Louvre", "Q19675", RES + "Louvre"),),
        graph={
            RES + "Louvre": (
                [
                    rel("Louvre", ONT + "location", "Paris"),
                    rel("Louvre", ONT + "country", "France"),
                    lit("Louvre", PROP + "visitors", "7726321", datatype=XSD + "integer"),
                ]
                + bookkeeping("Louvre", "Louvre", "Paris"),
                [],
            ),
        },
        kg_answer=Answer(
            label="Refuted",
            reason="Path {n} locates the Louvre in Paris, not London.",
            cite="location -> Paris",
        ),
    ),
    ClaimPlan(
        id="f015",
        text="Pride and Prejudice was written by Jane Austen.",
        gold="SUPPORTS",
        entities=(("Pride and Prejudice", "Q170583", RES + "Pride_and_Prejudice"),),
        graph={
            RES + "Pride_and_Prejudice": (
                [
                    rel("Pride_and_Prejudice", ONT + "author", "Jane_Austen"),
                    lit("Pride_and_Prejudice", ONT + "releaseDate", "1813-01-28", datatype=XSD + "date"),
                    rel("Pride_and_Prejudice", ONT + "literaryGenre", "Novel_of_manners"),
                    rel("Pride_and_Prejudice", ONT + "country", "United_Kingdom"),
                ]
                + bookkeeping("Pride_and_Prejudice", "Pride and Prejudice", "Jane_Austen"),
                [],
            ),
        },
        kg_answer=Answer(
            label="Supported",
            reason="Path {n} names Jane Austen as the author.",
            cite="author -> Jane_Austen",
        ),
    ),
    ClaimPlan(
        id="f016",
        text="Mount Everest is part of the Alps.",
        gold="REFUTES",
        entities=(("Mount Everest", "Q513", RES + "Mount_Everest"),),
        graph={
            RES + "Mount_Everest": (
                [
                    rel("Mount_Everest", ONT + "mountainRange", "Himalayas"),
                    lit("Mount_Everest", ONT + "elevation", "8849", datatype=XSD + "integer"),
                    rel("Mount_Everest", ONT + "location", "Nepal"),
                ]
                + bookkeeping("Mount_Everest", "Mount Everest", "Himalayas"),
                [],
            ),
        },
        kg_answer=Answer(
            label="Refuted",
            reason="Path {n} places Mount Everest in the Himalayas, not the Alps.",
            cite="mountainRange -> Himalayas",
        ),
    ),
    ClaimPlan(
        id="f017",
        text="The Beatles were formed in Liverpool.",
        gold="SUPPORTS",
        entities=(("The Beatles", "Q1299", RES + "The_Beatles"),),
        graph={
            RES + "The_Beatles": (
                [
                    rel("The_Beatles", ONT + "hometown", "Liverpool"),
                    rel("The_Beatles", ONT + "genre", "Rock_music"),
                    lit("The_Beatles", ONT + "activeYearsStartYear", "1960", datatype=XSD + "gYear"),
                    rel("The_Beatles", ONT + "bandMember", "John_Lennon"),
                ]
                + bookkeeping("The_Beatles", "The Beatles", "Liverpool"),
                [],
            ),
        },
        kg_answer=Answer(
            label="Supported",
            reason="Path {n} records Liverpool as the band's home city.",
            cite="hometown -> Liverpool",
        ),
    ),
    ClaimPlan(
        id="f018",
        text="The Godfather was directed by Martin Scorsese.",
        gold="REFUTES",
        entities=(("The Godfather", "Q47703", RES + "The_Godfather"),),
        graph={
            RES + "The_Godfather": (
                [
                    rel("The_Godfather", ONT + "director", "Francis_Ford_Coppola"),
                    rel("The_Godfather", ONT + "basedOn", "The_Godfather_(novel)"),
                    rel("The_Godfather", ONT + "starring", "Marlon_Brando"),
                    lit("The_Godfather", ONT + "releaseDate", "1972-03-24", datatype=XSD + "date"),
                ]
                + bookkeeping("The_Godfather", "The Godfather", "Francis_Ford_Coppola"),
                [],
            ),
        },
        kg_answer=Answer(
            label="Refuted",
            reason="Path {n} records Francis Ford Coppola as the director, not Martin Scorsese.",
            cite="director -> Francis_Ford_Coppola",
        ),
    ),
    ClaimPlan(
        id="f019",
        text="Finding Nemo was produced by Pixar.",
        gold="SUPPORTS",
        entities=(("Finding Nemo", "Q132863", RES + "Finding_Nemo"),),
        graph={
            RES + "Finding_Nemo": (
                [
                    rel("Finding_Nemo", ONT + "productionCompany", "Pixar"),
                    rel("Finding_Nemo", ONT + "director", "Andrew_Stanton"),
                    rel("Finding_Nemo", ONT + "distributor", "Walt_Disney_Pictures"),
                ]
                + bookkeeping("Finding_Nemo", "Finding Nemo", "Pixar"),
                [],
            ),
        },
        kg_answer=Answer(
            label="Supported",
            reason="Path {n} lists Pixar as the production company.",
            cite="productionCompany -> Pixar",
        ),
    ),
    ClaimPlan(
        id="f020",
        text="The Artemis I mission launched in November 2022.",
        gold="SUPPORTS",
        entities=(("Artemis I", "Q616235", RES + "Artemis_1"),),
        graph={
            RES + "Artemis_1": (
                [
                    rel("Artemis_1", ONT + "operator", "NASA"),
                    rel("Artemis_1", ONT + "rocket", "Space_Launch_System"),
                    rel("Artemis_1", ONT + "spacecraft", "Orion_(spacecraft)"),
                ]
                + bookkeeping("Artemis_1", "Artemis I", "NASA"),
                [],
            ),
        },
        kg_answer=Answer(
            label="Not Enough Info",
            reason="The paths describe the mission but none states its launch date.",
        ),
        web=WebPlan(
            queries=("artemis i launch date", "when did artemis 1 launch"),
            results={
                "artemis i launch date": hits(
                    (
                        "Artemis I launch",
                        "https://www.nasa.gov/missions/artemis/artemis-1-launch/",
                        "NASA's Artemis I mission launched on November 16, 2022, from Kennedy Space Center.",
                    ),
                    (
                        "Artemis 1 overview",
                        "https://en.wikipedia.org/wiki/Artemis_1",
                        "Artemis I was an uncrewed Moon-orbiting mission, the first flight of the Space Launch System.",
                    ),
                ),
                "when did artemis 1 launch": hits(
                    (
                        "Artemis I launch",
                        "https://www.nasa.gov/missions/artemis/artemis-1-launch/",
                        "NASA's Artemis I mission launched on November 16, 2022, from Kennedy Space Center.",
                    ),
                    (
                        "Orion splashdown",
                        "https://www.space.com/orion-splashdown-artemis-1",
                        "The Orion spacecraft splashed down on December 11, 2022, ending the Artemis I flight.",
                    ),
                ),
            },
            answer=Answer(
                label="Supported",
                reason="Snippet {n} confirms the launch on November 16, 2022.",
                cite="November 16, 2022",
            ),
        ),
    ),
    ClaimPlan(
        id="f021",
        text="The 2024 Summer Olympics were held in Los Angeles.",
        gold="REFUTES",
        # Nothing in the dictionary matches, so stage 1 hands over without
        # ever reaching the KG classifier.
        web=WebPlan(
            queries=("2024 summer olympics host city", "where were the 2024 olympics held"),
            results={
                "2024 summer olympics host city": hits(
                    (
                        "Paris 2024",
                        "https://olympics.com/en/paris-2024",
                        "The 2024 Summer Olympics were held in Paris, France, from 26 July to 11 August 2024.",
                    ),
                    (
                        "LA28 Games",
                        "https://la28.org/",
                        "Los Angeles will host the 2028 Summer Olympics.",
                    ),
                ),
                "where were the 2024 olympics held": hits(
                    (
                        "Paris 2024",
                        "https://olympics.com/en/paris-2024",
                        "The 2024 Summer Olympics were held in Paris, France, from 26 July to 11 August 2024.",
                    ),
                    (
                        "A century after 1924",
                        "https://www.britannica.com/event/Paris-1924-Olympic-Games",
                        "Paris hosted the Games for the third time, a century after 1924.",
                    ),
                ),
            },
            answer=Answer(
                label="Refuted",
                reason="Snippet {n} states the 2024 Summer Olympics were held in Paris, not Los Angeles.",
                cite="held in Paris",
            ),
        ),
    ),
    ClaimPlan(
        id="f022",
        text="Apple announced the Vision Pro headset in June 2023.",
        gold="SUPPORTS",
        entities=(("Vision Pro", "Q117801811", RES + "Apple_Vision_Pro"),),
        graph={
            RES + "Apple_Vision_Pro": (
                [
                    rel("Apple_Vision_Pro", ONT + "manufacturer", "Apple_Inc."),
                    rel("Apple_Vision_Pro", ONT + "operatingSystem", "VisionOS"),
                    rel("Apple_Vision_Pro", RDF_TYPE, "Mixed_reality_headset"),
                ]
                + bookkeeping("Apple_Vision_Pro", "Apple Vision Pro", "Apple_Inc."),
                [],
            ),
        },
        kg_answer=Answer(
            label="Not Enough Info",
            reason="The paths describe the device but none gives an announcement date.",
        ),
        web=WebPlan(
            queries=("apple vision pro announcement date", "when was apple vision pro announced"),
            results={
                "apple vision pro announcement date": hits(
                    (
                        "Apple introduces Vision Pro",
                        "https://www.apple.com/newsroom/2023/06/introducing-apple-vision-pro/",
                        "Apple announced the Vision Pro headset at WWDC on June 5, 2023.",
                    ),
                    (
                        "Vision Pro goes on sale",
                        "https://www.theverge.com/2024/2/2/apple-vision-pro-launch",
                        "The Vision Pro went on sale in the United States on February 2, 2024.",
                    ),
                ),
                "when was apple vision pro announced": hits(
                    (
                        "Apple introduces Vision Pro",
                        "https://www.apple.com/newsroom/2023/06/introducing-apple-vision-pro/",
                        "Apple announced the Vision Pro headset at WWDC on June 5, 2023.",
                    ),
                    (
                        "Apple's biggest bet",
                        "https://www.cnbc.com/2023/06/05/apple-wwdc-headset.html",
                        "Analysts called the reveal Apple's biggest product bet in a decade.",
                    ),
                ),
            },
            answer=Answer(
                label="Supported",
                reason="Snippet {n} confirms Apple announced the Vision Pro at WWDC in June 2023.",
                cite="June 5, 2023",
            ),
        ),
    ),
    ClaimPlan(
        id="f023",
        text="Lionel Messi joined Inter Miami in 2021.",
        gold="REFUTES",
        entities=(("Lionel Messi", "Q615", RES + "Lionel_Messi"),),
        graph={
            # A stale snapshot: no club arc at all, so the KG cannot answer.
            RES + "Lionel_Messi": (
                [
                    rel("Lionel_Messi", ONT + "birthPlace", "Rosario"),
                    rel("Lionel_Messi", ONT + "position", "Forward_(association_football)"),
                    lit("Lionel_Messi", ONT + "birthDate", "1987-06-24", datatype=XSD + "date"),
                ]
                + bookkeeping("Lionel_Messi", "Lionel Messi", "Argentina_national_football_team"),
                [],
            ),
        },
        kg_answer=Answer(
            label="Not Enough Info",
            reason="The paths cover birth details and position but not his current club.",
        ),
        web=WebPlan(
            queries=("lionel messi inter miami transfer year", "when did messi join inter miami"),
            results={
                "lionel messi inter miami transfer year": hits(
                    (
                        "Messi to Inter Miami",
                        "https://www.espn.com/soccer/story/messi-inter-miami-official",
                        "Lionel Messi officially joined Inter Miami in July 2023 after leaving Paris Saint-Germain.",
                    ),
                    (
                        "World Cup 2022",
                        "https://www.fifa.com/worldcup/qatar2022-final",
                        "Messi won the 2022 World Cup with Argentina in Qatar.",
                    ),
                ),
                "when did messi join inter miami": hits(
                    (
                        "Messi to Inter Miami",
                        "https://www.espn.com/soccer/story/messi-inter-miami-official",
                        "Lionel Messi officially joined Inter Miami in July 2023 after leaving Paris Saint-Germain.",
                    ),
                    (
                        "Messi contract details",
                        "https://www.mlssoccer.com/news/messi-contract-inter-miami",
                        "Inter Miami signed Messi to a contract running through the 2025 season.",
                    ),
                ),
            },
            answer=Answer(
                label="Refuted",
                reason="Snippet {n} reports Messi joined Inter Miami in July 2023, not 2021.",
                cite="July 2023",
            ),
        ),
    ),
    ClaimPlan(
        id="f024",
        text="Jon Fosse was awarded the Nobel Prize in Literature.",
        gold="SUPPORTS",
        entities=(("Jon Fosse", "Q356309", RES + "Jon_Fosse"),),
        graph={
            RES + "Jon_Fosse": (
                [
                    rel("Jon_Fosse", ONT + "award", "Nobel_Prize_in_Literature"),
                    rel("Jon_Fosse", ONT + "occupation", "Playwright"),
                    rel("Jon_Fosse", ONT + "birthPlace", "Haugesund"),
                    lit("Jon_Fosse", RDFS_LABEL, "Jon Fosse", lang="nn"),
                ]
                + bookkeeping("Jon_Fosse", "Jon Fosse", "Nobel_Prize_in_Literature"),
                [],
            ),
        },
        kg_answer=Answer(
            label="Supported",
            reason="Path {n} shows the Nobel Prize in Literature among his awards.",
            cite="award -> Nobel_Prize_in_Literature",
        ),
    ),
    ClaimPlan(
        id="f025",
        text="LK-99 has been confirmed as a room-temperature superconductor.",
        gold="REFUTES",
        web=WebPlan(
            queries=(
                "lk-99 room temperature superconductor confirmed",
                "lk-99 replication results",
                "lk-99 superconductivity evidence",
            ),
            results={
                "lk-99 room temperature superconductor confirmed": hits(
                    (
                        "LK-99 fails replication",
                        "https://www.nature.com/articles/lk99-replication-efforts",
                        "Multiple replication attempts found no superconductivity in LK-99 samples.",
                    ),
                    (
                        "The LK-99 claim",
                        "https://www.science.org/content/article/lk-99-preprint",
                        "LK-99 drew worldwide attention after a July 2023 preprint claimed room-temperature superconductivity.",
                    ),
                ),
                "lk-99 replication results": hits(
                    (
                        "Impurities explain LK-99",
                        "https://arxiv.org/abs/2308.05778",
                        "Researchers attribute LK-99's resistance drops to copper sulfide impurities rather than superconductivity.",
                    ),
                    (
                        "LK-99 fails replication",
                        "https://www.nature.com/articles/lk99-replication-efforts",
                        "Multiple replication attempts found no superconductivity in LK-99 samples.",
                    ),
                ),
                # A query that comes back dry; merging must shrug it off.
                "lk-99 superconductivity evidence": [],
            },
            answer=Answer(
                label="Refuted",
                reason="Snippet {n} reports replication attempts found no superconductivity in LK-99.",
                cite="replication attempts found no superconductivity",
            ),
        ),
    ),
)


# --- scripted chat model ------------------------------------------------------

_NUMBERED_LINE = re.compile(r"^(\d+)\. (.*)$")


def claim_of(user_text: str) -> str:
    first = user_text.splitlines()[0]
    if not first.startswith("Claim: "):
        raise AssertionError(f"prompt does not lead with the claim: {first!r}")
    return first[len("Claim: "):]


def evidence_lines(user_text: str) -> list[str]:
    """The numbered evidence block right under its header, in prompt order."""
    lines = user_text.splitlines()
    for i, line in enumerate(lines):
        if line in ("Evidence paths:", "Evidence snippets:"):
            block = []
            for candidate in lines[i + 1:]:
                match = _NUMBERED_LINE.match(candidate)
                if not match:
                    break
                block.append(match.group(2))
            return block
    raise AssertionError("prompt carries no evidence block")


class ScriptedModel:
    """Stands in for the chat model while fixtures are recorded."""

    def __init__(self, plans: dict[str, ClaimPlan]):
        self._by_text = plans

    def __call__(self, system_text: str, user_text: str) -> str:
        lowered = system_text.lower()
        plan = self._by_text[claim_of(user_text)]
        if "search queries" in lowered:
            assert plan.web is not None, f"{plan.id}: rewrite requested but no web plan"
            return json.dumps({"queries": list(plan.web.queries)})
        if "evidence paths" in lowered:
            assert plan.kg_answer is not None, f"{plan.id}: KG verdict requested but not scripted"
            return self._verdict(plan.id, plan.kg_answer, evidence_lines(user_text))
        assert "evidence snippets" in lowered, f"unrecognized prompt: {system_text[:80]!r}"
        assert plan.web is not None, f"{plan.id}: web verdict requested but no web plan"
        return self._verdict(plan.id, plan.web.answer, evidence_lines(user_text))

    @staticmethod
    def _verdict(claim_id: str, answer: Answer, lines: list[str]) -> str:
        reason = answer.reason
        if answer.cite is not None:
            matches = [i for i, line in enumerate(lines, start=1) if answer.cite in line]
            assert len(matches) == 1, (
                f"{claim_id}: cite key {answer.cite!r} matched lines {matches} in {lines}"
            )
            reason = reason.format(n=matches[0])
        return json.dumps({"label": answer.label, "reason": reason})


# --- recording and validation -------------------------------------------------


def write_static_fixtures(root: Path) -> None:
    sparql = RecordedSparqlTransport(root)
    search = FixtureSearchBackend(root)
    dictionary: dict[str, tuple[str, str]] = {}
    for plan in WORLD:
        for surface, qid, iri in plan.entities:
            row = (qid, iri or "")
            if dictionary.setdefault(surface, row) != row:
                raise AssertionError(f"conflicting dictionary rows for surface {surface!r}")
        for qid, iri in plan.sameas.items():
            sparql.record(sameas_query(qid), sameas_results(iri))
        for iri, (triples, extra_rows) in plan.graph.items():
            sparql.record(one_hop_query(iri), one_hop_results(triples, extra_rows))
        if plan.web is not None:
            if set(plan.web.results) != set(plan.web.queries):
                raise AssertionError(f"{plan.id}: recorded queries do not match the planned rewrite")
            for query, snippets in plan.web.results.items():
                search.record(query, snippets)

    lines = ["# surface\tqid\tdbpedia_iri"]
    lines += [f"{surface}\t{qid}\t{iri}" for surface, (qid, iri) in sorted(dictionary.items())]
    (root / "linker.tsv").write_text("\n".join(lines) + "\n", encoding="utf-8")


def authoring_pipeline(root: Path) -> Pipeline:
    config = PipelineConfig(fixture_dir=str(root))
    sparql = RecordedSparqlTransport(root)
    return Pipeline(
        config,
        linker_primary=DictionaryLinker(root / "linker.tsv"),
        linker_fallback=None,
        sparql=sparql,
        triple_source=SparqlTripleSource(sparql),
        blacklist=PredicateBlacklist.default(),
        scorer=LexicalOverlapScorer(),
        chat=RecordingChatBackend(root, ScriptedModel({plan.text: plan for plan in WORLD})),
        nli=None,  # every classifier in this suite is the LLM; never consulted
        search=FixtureSearchBackend(root),
    )


def stripped(result) -> dict:
    payload = result.to_json_dict()
    del payload["latency_ms"]  # wall-clock noise has no place in a golden
    return payload


def check_example_traces(results: dict) -> None:
    """The three flagship claims must come out exactly as documented."""
    ex1 = results["f001"]
    assert ex1.stage is Stage.WEB and ex1.fallback_used
    assert ex1.verdict.reason == (
        "Snippet 2 indicates Donald Trump is a President-Elect, so he is eligible to become president."
    )
    assert ex1.verdict.cited_evidence == (1,)
    assert ex1.evidence[1].text == NYPOST_SNIPPET

    ex2 = results["f002"]
    assert ex2.stage is Stage.KG and not ex2.fallback_used
    assert ex2.verdict.cited_evidence == (0,)
    assert ex2.evidence[0].text == f"Black_Mirror -> abstract -> {BLACK_MIRROR_ABSTRACT}"

    ex3 = results["f003"]
    assert ex3.stage is Stage.KG
    assert ex3.verdict.cited_evidence == (0,)
    assert ex3.evidence[0].text == "Arya_Stark -> creator -> George_R._R._Martin"
    assert ex3.verdict.reason == "Path 1 directly records creator George R. R. Martin for Arya Stark."


def main() -> None:
    if SUITE.exists():
        shutil.rmtree(SUITE)
    SUITE.mkdir(parents=True)

    write_static_fixtures(SUITE)

    pipeline = authoring_pipeline(SUITE)
    results = {}
    for plan in WORLD:
        claim = Claim(id=plan.id, text=plan.text, gold_label=parse_label(plan.gold))
        result = pipeline.verify(claim)
        assert result.final_label is claim.gold_label, (
            f"{plan.id}: predicted {result.final_label} against gold {plan.gold}"
        )
        expected_stage = Stage.WEB if plan.web is not None else Stage.KG
        assert result.stage is expected_stage, f"{plan.id}: decided at {result.stage}, planned {expected_stage}"
        results[plan.id] = result
        print(f"  {plan.id}  {result.stage.value:3}  {result.final_label.value}")

    check_example_traces(results)
    fallbacks = sum(1 for r in results.values() if r.fallback_used)
    assert len(results) == 25 and fallbacks == 6, f"{fallbacks} fallbacks over {len(results)} claims"

    dataset_lines = [
        json.dumps({"id": plan.id, "claim": plan.text, "label": plan.gold}, ensure_ascii=False)
        for plan in WORLD
    ]
    (SUITE / "dataset.jsonl").write_text("\n".join(dataset_lines) + "\n", encoding="utf-8")
    goldens = {claim_id: stripped(result) for claim_id, result in results.items()}
    (SUITE / "goldens.json").write_text(
        json.dumps(goldens, ensure_ascii=False, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )

    # Replay through the stock fixture wiring; authoring must leave behind a
    # suite that reproduces itself without the scripted model.
    replay = build_pipeline(PipelineConfig(fixture_dir=str(SUITE)))
    for claim in load_fever_jsonl(SUITE / "dataset.jsonl"):
        again = stripped(replay.verify(claim))
        assert again == goldens[claim.id], f"replay diverged for {claim.id}"

    fixture_count = sum(1 for _ in SUITE.rglob("*.json")) - 1  # goldens.json is not a fixture
    print(f"suite rebuilt: 25 claims, {fallbacks} web fallbacks, {fixture_count} recorded fixtures")


if __name__ == "__main__":
    main()
