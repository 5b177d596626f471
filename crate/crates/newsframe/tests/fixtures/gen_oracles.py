"""Regenerates the reference-implementation fixtures used by tests/oracles.rs.

Requires torch, torchvision, transformers and safetensors. Weights are stored
as float32; expected outputs are computed in float64 from those same weights.
"""

import json
import math
import os

import torch
from safetensors.torch import save_file
from torchvision.models.resnet import Bottleneck
from transformers import BertConfig, BertModel, BertTokenizer

HERE = os.path.dirname(os.path.abspath(__file__))
torch.manual_seed(7)

# Text encoder.
words = [
    "the", "gun", "police", "school", "safety", "shooting", "law", "vote", "senate", "##s", "##ing", "##ed",
    "a", "of", "in", "to", "new", "rights", "cafe", "nino", "uber", "debate", "mental", "health", "!", ",", ".",
    "'", "-", "/", "2", "##nd", "amendment", "s", "t", "e", "n", "##e", "##n", "##t",
]
vocab = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"] + words
bert_dir = os.path.join(HERE, "bert_tiny")
os.makedirs(bert_dir, exist_ok=True)
with open(os.path.join(bert_dir, "vocab.txt"), "w") as f:
    f.write("\n".join(vocab) + "\n")

cfg = BertConfig(
    vocab_size=len(vocab),
    hidden_size=32,
    num_hidden_layers=4,
    num_attention_heads=4,
    intermediate_size=37,
    max_position_embeddings=64,
    type_vocab_size=2,
    hidden_act="gelu",
    hidden_dropout_prob=0.0,
    attention_probs_dropout_prob=0.0,
)
model = BertModel(cfg, add_pooling_layer=False).eval()
with torch.no_grad():
    for p in model.parameters():
        p.add_(0.05 * torch.randn_like(p))
state = {k: v.detach().float().contiguous() for k, v in model.state_dict().items() if "position_ids" not in k}
save_file(state, os.path.join(bert_dir, "model.safetensors"))
with open(os.path.join(bert_dir, "config.json"), "w") as f:
    json.dump(json.loads(cfg.to_json_string()), f, indent=2)
with open(os.path.join(bert_dir, "tokenizer_config.json"), "w") as f:
    json.dump({"do_lower_case": True}, f)

tok = BertTokenizer(os.path.join(bert_dir, "vocab.txt"), do_lower_case=True)
texts = [
    "The Senate debate on gun rights",
    "Shooting near a school: police say safety law is new!",
    "Café Niño, Über-debate",
    "2nd Amendment rights' vote",
    "unknownword gunned tests",
]
model64 = model.double()
cases = []
for t in texts:
    enc = tok(t, return_tensors="pt")
    with torch.no_grad():
        out = model64(**enc, output_hidden_states=True)
    hs = out.hidden_states
    last4 = torch.cat(hs[-4:], dim=-1)[0]
    cases.append(
        {
            "text": t,
            "ids": enc["input_ids"][0].tolist(),
            "last4": last4.tolist(),
        }
    )
with open(os.path.join(HERE, "bert_tiny_expected.json"), "w") as f:
    json.dump({"cases": cases}, f)

# Image encoder: torchvision bottleneck blocks at a reduced width.
class SmallResNet(torch.nn.Module):
    def __init__(self, layers, width, feature_dim):
        super().__init__()
        self.conv1 = torch.nn.Conv2d(3, width, 7, 2, 3, bias=False)
        self.bn1 = torch.nn.BatchNorm2d(width)
        self.relu = torch.nn.ReLU()
        self.maxpool = torch.nn.MaxPool2d(3, 2, 1)
        inplanes = width
        for i, n in enumerate(layers):
            planes = width * 2**i
            stride = 1 if i == 0 else 2
            blocks = []
            for b in range(n):
                down = None
                if b == 0 and (stride != 1 or inplanes != planes * 4):
                    down = torch.nn.Sequential(
                        torch.nn.Conv2d(inplanes, planes * 4, 1, stride, bias=False),
                        torch.nn.BatchNorm2d(planes * 4),
                    )
                blocks.append(Bottleneck(inplanes, planes, stride if b == 0 else 1, down))
                inplanes = planes * 4
            setattr(self, f"layer{i + 1}", torch.nn.Sequential(*blocks))
        self.feature = torch.nn.Linear(inplanes, feature_dim)

    def forward(self, x):
        x = self.maxpool(self.relu(self.bn1(self.conv1(x))))
        for i in range(4):
            x = getattr(self, f"layer{i + 1}")(x)
        x = x.mean(dim=(2, 3))
        return torch.relu(self.feature(x))


net = SmallResNet([1, 2, 1, 1], 8, 16).eval()
with torch.no_grad():
    for name, m in net.named_modules():
        if isinstance(m, torch.nn.BatchNorm2d):
            m.running_mean.copy_(0.1 * torch.randn_like(m.running_mean))
            m.running_var.copy_(0.5 + torch.rand_like(m.running_var))
            m.weight.copy_(1.0 + 0.1 * torch.randn_like(m.weight))
            m.bias.copy_(0.1 * torch.randn_like(m.bias))
res_dir = os.path.join(HERE, "resnet_tiny")
os.makedirs(res_dir, exist_ok=True)
save_file({k: v.detach().float().contiguous() for k, v in net.state_dict().items()}, os.path.join(res_dir, "model.safetensors"))
with open(os.path.join(res_dir, "config.json"), "w") as f:
    json.dump({"layers": [1, 2, 1, 1], "base_width": 8, "feature_dim": 16, "dropout": 0.5}, f)

size = 224
img = torch.zeros(1, 3, size, size, dtype=torch.float64)
for c in range(3):
    for y in range(size):
        for x in range(size):
            img[0, c, y, x] = math.sin(1.3 * c + 0.07 * y + 0.11 * x) + 0.25 * math.cos(0.05 * x * y / (c + 1))
img = img.float().double()  # the Rust side holds images as float32
net = net.double()
with torch.no_grad():
    feats = net(img)[0].tolist()
with open(os.path.join(HERE, "resnet_tiny_expected.json"), "w") as f:
    json.dump({"size": size, "features": feats}, f)
print("ok")
