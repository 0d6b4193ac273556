import pytest
import torch
from transformers import BertConfig, BertForSequenceClassification, BertTokenizer

_VOCAB = (
    ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"]
    + list("abcdefghijklmnopqrstuvwxyz")
    + ["##" + c for c in "abcdefghijklmnopqrstuvwxyz"]
    + ["good", "bad", "great", "awful", "fine", "terrible",
       "movie", "film", "the", "was", "is", "not", "very"]
)


@pytest.fixture(scope="session")
def tiny_model_dir(tmp_path_factory):
    """A small randomly-initialized two-class model saved to disk."""
    d = tmp_path_factory.mktemp("tiny-model")
    (d / "vocab.txt").write_text("\n".join(_VOCAB) + "\n")
    tokenizer = BertTokenizer(str(d / "vocab.txt"))
    torch.manual_seed(1234)
    config = BertConfig(
        vocab_size=len(_VOCAB),
        hidden_size=16,
        num_hidden_layers=1,
        num_attention_heads=2,
        intermediate_size=32,
        max_position_embeddings=64,
        num_labels=2,
    )
    model = BertForSequenceClassification(config)
    model.save_pretrained(d)
    tokenizer.save_pretrained(d)
    return d


@pytest.fixture
def ten_line_fixture(tmp_path):
    """Ten labeled texts drawn from the tiny model's vocabulary."""
    lines = ["id,text,label"]
    texts = [
        ("t0", "the movie was great", 1),
        ("t1", "awful film", 0),
        ("t2", "very good movie", 1),
        ("t3", "the film was terrible", 0),
        ("t4", "fine movie", 1),
        ("t5", "not good", 0),
        ("t6", "great great great", 1),
        ("t7", "bad bad movie", 0),
        ("t8", "the movie is fine", 1),
        ("t9", "the film was not great", 0),
    ]
    lines += [f"{i},{t},{y}" for i, t, y in texts]
    path = tmp_path / "texts.csv"
    path.write_text("\n".join(lines) + "\n")
    return path
