"""Feature vectors, cosine math, and the greedy image assignment."""

import math
import random

import pytest

from storyweaver.article import ImageAsset, filter_sections, load_article
from storyweaver.errors import ProviderError
from storyweaver.matching import (
    FeatureSet,
    FeatureVector,
    assign_images,
    build_features,
    build_vocab,
    cosine,
    featurize_image,
    featurize_text,
    ingest_external_vector,
    tokenize_filename,
)
from storyweaver.planner import (
    MAIN_STORY_ID,
    Page,
    PlannerConfig,
    Story,
    StorySet,
    plan,
)
from storyweaver.summarize import SummarizerConfig, summarize_article

from .conftest import make_article
from .oracles import oracle_assign, oracle_cosine


class TestFeaturizing:
    def test_identical_texts_have_cosine_one(self):
        vocab = ["apple", "red", "tree"]
        a = featurize_text("red apple tree", vocab)
        b = featurize_text("red apple tree", vocab)
        assert cosine(a, b) == pytest.approx(1.0, abs=1e-9)

    def test_disjoint_vocabulary_has_cosine_zero(self):
        vocab = ["apple", "stone", "tree", "water"]
        a = featurize_text("apple tree", vocab)
        b = featurize_text("stone water", vocab)
        assert cosine(a, b) == 0.0

    def test_half_overlap_arithmetic(self):
        # "red apple" vs "red tree": normalized TF vectors share one of two
        # terms, so the cosine is exactly 0.5.
        vocab = ["apple", "red", "tree"]
        a = featurize_text("red apple", vocab)
        b = featurize_text("red tree", vocab)
        assert cosine(a, b) == pytest.approx(0.5, abs=1e-9)

    def test_filename_tokenizer(self):
        assert tokenize_filename("red_apple_tree.jpg") == ["red", "apple", "tree"]
        assert tokenize_filename("a/b/Red-Apple01.PNG") == ["red", "apple01"]

    def test_empty_caption_uses_filename_tokens(self):
        image = ImageAsset(
            id="i", source_url="pics/red_apple_tree.jpg", caption="",
            width=10, height=10, section_index="", license_tag="CC0",
        )
        vocab = build_vocab({}, [image])
        assert vocab == ["apple", "red", "tree"]
        vec = featurize_image(image, vocab)
        assert vec.is_usable()
        assert cosine(vec, featurize_text("red apple tree", vocab)) == pytest.approx(1.0)

    def test_caption_identical_to_summary_matches_perfectly(self):
        vocab = ["fig", "ripe"]
        image = ImageAsset(
            id="i", source_url="x.png", caption="ripe fig",
            width=5, height=5, section_index="", license_tag="CC0",
        )
        assert cosine(featurize_image(image, vocab), featurize_text("ripe fig", vocab)) == pytest.approx(1.0)

    def test_external_vector_wrong_length_is_provider_error(self):
        ingest_external_vector([1.0, 0.0], expected_dim=2)
        with pytest.raises(ProviderError, match="dimension"):
            ingest_external_vector([1.0, 0.0, 0.0], expected_dim=2)

    def test_cosine_symmetry(self):
        rng = random.Random(7)
        for _ in range(50):
            a = FeatureVector([rng.uniform(-1, 1) for _ in range(6)])
            b = FeatureVector([rng.uniform(-1, 1) for _ in range(6)])
            assert abs(cosine(a, b) - cosine(b, a)) < 1e-12

    def test_all_zero_vector_is_unusable(self):
        assert not FeatureVector([0.0, 0.0]).is_usable()


def _image(image_id, section, w=10, h=10):
    return ImageAsset(
        id=image_id, source_url=f"{image_id}.png", caption="",
        width=w, height=h, section_index=section, license_tag="CC0",
    )


def _synthetic_set(page_sections: list[str]) -> StorySet:
    pages = [Page(kind="cover", heading="T", snippet="", section_index="", source_anchor="")]
    pages += [
        Page(kind="content", heading="", snippet=f"page {i}", section_index=sec, source_anchor="")
        for i, sec in enumerate(page_sections)
    ]
    pages.append(Page(kind="end", heading="", snippet="", section_index="", source_anchor=""))
    story = Story(id=MAIN_STORY_ID, kind="main", title="T", section_index="", pages=pages)
    return StorySet(stories=[story], entry=MAIN_STORY_ID, manifest=[], mode="compact")


def _features(story_set, vectors_by_ordinal, image_vectors) -> FeatureSet:
    pages = {}
    for story in story_set.stories:
        for ordinal, page in enumerate(story.pages):
            if page.kind == "content":
                pages[(story.id, ordinal)] = FeatureVector(vectors_by_ordinal[ordinal])
    return FeatureSet(
        pages=pages,
        images={img_id: FeatureVector(v) for img_id, v in image_vectors.items()},
    )


class TestAssignment:
    def test_singleton_local_pool_wins_regardless_of_similarity(self):
        article = make_article(sections=[("S", "text.", [])], images=[_image("only", "1")])
        story_set = _synthetic_set(["1"])
        features = _features(story_set, {1: [0.0, 1.0]}, {"only": [1.0, 0.0]})
        assignments = assign_images(story_set, article, features)
        content = [a for a in assignments if a.page_ordinal == 1]
        assert content[0].image_id == "only"
        assert content[0].similarity == 0.0

    def test_repetition_picks_second_best(self):
        article = make_article(
            sections=[("S", "text.", [])],
            images=[_image("a", "1"), _image("b", "1")],
        )
        story_set = _synthetic_set(["1", "1"])
        # Both pages prefer image a (0.9 vs 0.7); the second must avoid it.
        features = _features(
            story_set,
            {1: [1.0, 0.0], 2: [1.0, 0.0]},
            {"a": [0.9, math.sqrt(1 - 0.81)], "b": [0.7, math.sqrt(1 - 0.49)]},
        )
        assignments = assign_images(story_set, article, features)
        by_ordinal = {a.page_ordinal: a for a in assignments}
        assert by_ordinal[1].image_id == "a"
        assert by_ordinal[2].image_id == "b"
        assert by_ordinal[2].fallback_reason == "repetition_avoided"
        assert by_ordinal[2].similarity == pytest.approx(0.7, abs=1e-9)

    def test_local_pool_not_subject_to_global_fallback_reason(self):
        article = make_article(sections=[("S", "text.", [])], images=[_image("a", "1")])
        story_set = _synthetic_set(["1"])
        features = _features(story_set, {1: [1.0, 0.0]}, {"a": [1.0, 0.0]})
        assignments = assign_images(story_set, article, features)
        assert assignments[0].fallback_reason is None

    def test_imageless_section_draws_from_global_pool(self):
        article = make_article(
            sections=[("Has", "text.", []), ("Not", "text.", [])],
            images=[_image("a", "1"), _image("b", "1"), _image("c", "")],
        )
        story_set = _synthetic_set(["2"])
        features = _features(
            story_set,
            {1: [1.0, 0.0, 0.0]},
            {"a": [0.2, 1.0, 0.0], "b": [0.9, 0.1, 0.0], "c": [0.5, 0.5, 0.0]},
        )
        assignments = assign_images(story_set, article, features)
        assert assignments[0].image_id == "b"
        assert assignments[0].fallback_reason == "no_local_image"

    def test_stealing_a_sections_only_image_is_reported(self):
        article = make_article(
            sections=[("Has", "text.", []), ("Not", "text.", [])],
            images=[_image("lone", "1")],
        )
        story_set = _synthetic_set(["2"])
        features = _features(story_set, {1: [1.0]}, {"lone": [1.0]})
        assignments = assign_images(story_set, article, features)
        assert assignments[0].fallback_reason == "reassigned_from_other_section"

    def test_cover_reuses_first_content_pages_best(self):
        article = make_article(sections=[("S", "text.", [])], images=[_image("a", "1"), _image("b", "1")])
        story_set = _synthetic_set(["1"])
        features = _features(
            story_set, {1: [1.0, 0.0]}, {"a": [1.0, 0.0], "b": [0.0, 1.0]}
        )
        assign_images(story_set, article, features)
        assert story_set.stories[0].pages[0].image_ref == "a"

    def test_zero_usable_images_flags_text_only(self):
        article = make_article(sections=[("S", "text.", [])], images=[])
        story_set = _synthetic_set(["1"])
        features = FeatureSet(pages={(MAIN_STORY_ID, 1): FeatureVector([1.0])}, images={})
        assignments = assign_images(story_set, article, features)
        assert assignments == []
        assert story_set.stories[0].pages[1].text_only is True
        assert any("no usable images" in w for w in story_set.warnings)

    def test_deterministic_across_runs(self, corpus_dir):
        results = []
        for _ in range(2):
            article = filter_sections(load_article(corpus_dir / "silverleaf_fig.yaml"))
            summaries = summarize_article(article, SummarizerConfig())
            story_set = plan(article, summaries, PlannerConfig())
            features = build_features(story_set, article, summaries)
            assignments = assign_images(story_set, article, features)
            results.append([(a.story_id, a.page_ordinal, a.image_id, round(a.similarity, 12)) for a in assignments])
        assert results[0] == results[1]


@pytest.fixture(scope="module")
def assigned_corpus(corpus_dir):
    out = []
    for name in ("silverleaf_fig", "velden", "stone_mill", "harbor_crossing"):
        article = filter_sections(load_article(corpus_dir / f"{name}.yaml"))
        summaries = summarize_article(article, SummarizerConfig())
        story_set = plan(article, summaries, PlannerConfig())
        features = build_features(story_set, article, summaries)
        assign_images(story_set, article, features)
        out.append((article, story_set))
    return out


class TestAssignmentProperties:

    def test_no_immediate_repetition_with_big_enough_pools(self, assigned_corpus):
        for article, story_set in assigned_corpus:
            by_section = {}
            for img in article.images:
                by_section.setdefault(img.section_index, []).append(img.id)
            total = len(article.images)
            for story in story_set.stories:
                previous = None
                for page in story.content_pages:
                    pool = len(by_section.get(page.section_index, [])) or total
                    if previous is not None and pool >= 2:
                        assert page.image_ref != previous, (story.id, page.snippet[:30])
                    previous = page.image_ref

    def test_locality(self, assigned_corpus):
        for article, story_set in assigned_corpus:
            owners = {img.id: img.section_index for img in article.images}
            sections_with_images = set(owners.values())
            for story in story_set.stories:
                for page in story.content_pages:
                    if page.section_index in sections_with_images:
                        assert owners[page.image_ref] == page.section_index


class TestOracleEquivalence:
    def _random_instance(self, rng: random.Random):
        n_images = rng.randint(1, 6)
        n_pages = rng.randint(1, 6)
        sections = ["", "1", "2", "3"]
        images = [
            _image(f"i{k}", rng.choice(sections)) for k in range(n_images)
        ]
        page_sections = [rng.choice(sections) for _ in range(n_pages)]
        article = make_article(
            sections=[("A", "t.", []), ("B", "t.", []), ("C", "t.", [])],
            images=images,
        )
        story_set = _synthetic_set(page_sections)
        dim = 4
        page_vecs = {
            ordinal + 1: [rng.uniform(0, 1) for _ in range(dim)] for ordinal in range(n_pages)
        }
        image_vecs = {img.id: [rng.uniform(0, 1) for _ in range(dim)] for img in images}
        return article, story_set, page_vecs, image_vecs, images, page_sections

    def test_greedy_matches_brute_force_oracle(self):
        rng = random.Random(90125)
        for _ in range(25):
            article, story_set, page_vecs, image_vecs, images, page_sections = (
                self._random_instance(rng)
            )
            features = _features(story_set, page_vecs, image_vecs)
            got = [
                (a.story_id, a.page_ordinal, a.image_id)
                for a in assign_images(story_set, article, features)
                if a.page_ordinal != 0
            ]
            section_order = [s.index for s in article.sections()]
            expected = oracle_assign(
                [(MAIN_STORY_ID, [{"ordinal": i + 1, "section": sec} for i, sec in enumerate(page_sections)])],
                [{"id": img.id, "section": img.section_index} for img in images],
                {(MAIN_STORY_ID, i + 1): page_vecs[i + 1] for i in range(len(page_sections))},
                image_vecs,
                section_order,
            )
            assert got == expected

    def test_oracle_cosine_agrees_with_package_cosine(self):
        rng = random.Random(11)
        for _ in range(20):
            a = [rng.uniform(-1, 1) for _ in range(5)]
            b = [rng.uniform(-1, 1) for _ in range(5)]
            assert oracle_cosine(a, b) == pytest.approx(
                cosine(FeatureVector(a), FeatureVector(b)), abs=1e-12
            )
