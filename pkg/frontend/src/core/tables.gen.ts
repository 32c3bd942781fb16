// generated by scripts/generate_tables.py from the Python package
// resources; do not edit by hand (tests/tables-parity.test.ts checks this)

export const CONTRACTIONS: Record<string, string> = {
  "ain't": "is not",
  "aren't": "are not",
  "can't": "cannot",
  "can't've": "cannot have",
  "'cause": "because",
  "could've": "could have",
  "couldn't": "could not",
  "couldn't've": "could not have",
  "didn't": "did not",
  "doesn't": "does not",
  "don't": "do not",
  "hadn't": "had not",
  "hadn't've": "had not have",
  "hasn't": "has not",
  "haven't": "have not",
  "he'd": "he would",
  "he'd've": "he would have",
  "he'll": "he will",
  "he'll've": "he will have",
  "he's": "he is",
  "how'd": "how did",
  "how'd'y": "how do you",
  "how'll": "how will",
  "how's": "how is",
  "i'd": "i would",
  "i'd've": "i would have",
  "i'll": "i will",
  "i'll've": "i will have",
  "i'm": "i am",
  "i've": "i have",
  "isn't": "is not",
  "it'd": "it would",
  "it'd've": "it would have",
  "it'll": "it will",
  "it'll've": "it will have",
  "it's": "it is",
  "let's": "let us",
  "ma'am": "madam",
  "mayn't": "may not",
  "might've": "might have",
  "mightn't": "might not",
  "mightn't've": "might not have",
  "must've": "must have",
  "mustn't": "must not",
  "mustn't've": "must not have",
  "needn't": "need not",
  "needn't've": "need not have",
  "o'clock": "of the clock",
  "oughtn't": "ought not",
  "oughtn't've": "ought not have",
  "shan't": "shall not",
  "sha'n't": "shall not",
  "shan't've": "shall not have",
  "she'd": "she would",
  "she'd've": "she would have",
  "she'll": "she will",
  "she'll've": "she will have",
  "she's": "she is",
  "should've": "should have",
  "shouldn't": "should not",
  "shouldn't've": "should not have",
  "so've": "so have",
  "so's": "so is",
  "that'd": "that would",
  "that'd've": "that would have",
  "that's": "that is",
  "there'd": "there would",
  "there'd've": "there would have",
  "there's": "there is",
  "they'd": "they would",
  "they'd've": "they would have",
  "they'll": "they will",
  "they'll've": "they will have",
  "they're": "they are",
  "they've": "they have",
  "to've": "to have",
  "wasn't": "was not",
  "we'd": "we would",
  "we'd've": "we would have",
  "we'll": "we will",
  "we'll've": "we will have",
  "we're": "we are",
  "we've": "we have",
  "weren't": "were not",
  "what'll": "what will",
  "what'll've": "what will have",
  "what're": "what are",
  "what's": "what is",
  "what've": "what have",
  "when's": "when is",
  "when've": "when have",
  "where'd": "where did",
  "where's": "where is",
  "where've": "where have",
  "who'll": "who will",
  "who'll've": "who will have",
  "who's": "who is",
  "who've": "who have",
  "why's": "why is",
  "why've": "why have",
  "will've": "will have",
  "won't": "will not",
  "won't've": "will not have",
  "would've": "would have",
  "wouldn't": "would not",
  "wouldn't've": "would not have",
  "y'all": "you all",
  "y'all'd": "you all would",
  "y'all'd've": "you all would have",
  "y'all're": "you all are",
  "y'all've": "you all have",
  "you'd": "you would",
  "you'd've": "you would have",
  "you'll": "you will",
  "you'll've": "you will have",
  "you're": "you are",
  "you've": "you have",
  "gonna": "going to",
  "gotta": "got to",
  "wanna": "want to",
  "kinda": "kind of",
  "sorta": "sort of",
  "lemme": "let me",
  "gimme": "give me"
};

export const EMOJI_ALIASES: Record<number, string> = {
  "128512": ":grinning:",
  "128515": ":smiley:",
  "128516": ":smile:",
  "128513": ":grin:",
  "128518": ":laughing:",
  "128517": ":sweat_smile:",
  "128514": ":joy:",
  "129315": ":rofl:",
  "9786": ":relaxed:",
  "128522": ":blush:",
  "128519": ":innocent:",
  "128578": ":slightly_smiling_face:",
  "128579": ":upside_down_face:",
  "128521": ":wink:",
  "128524": ":relieved:",
  "128525": ":heart_eyes:",
  "129392": ":smiling_face_with_hearts:",
  "128536": ":kissing_heart:",
  "128535": ":kissing:",
  "128537": ":kissing_smiling_eyes:",
  "128538": ":kissing_closed_eyes:",
  "128523": ":yum:",
  "128539": ":stuck_out_tongue:",
  "128541": ":stuck_out_tongue_closed_eyes:",
  "128540": ":stuck_out_tongue_winking_eye:",
  "129322": ":zany_face:",
  "129320": ":raised_eyebrow:",
  "129488": ":monocle_face:",
  "129299": ":nerd_face:",
  "128526": ":sunglasses:",
  "129321": ":star_struck:",
  "129395": ":partying_face:",
  "128527": ":smirk:",
  "128530": ":unamused:",
  "128542": ":disappointed:",
  "128532": ":pensive:",
  "128543": ":worried:",
  "128533": ":confused:",
  "128577": ":slightly_frowning_face:",
  "9785": ":frowning_face:",
  "128547": ":persevere:",
  "128534": ":confounded:",
  "128555": ":tired_face:",
  "128553": ":weary:",
  "129402": ":pleading_face:",
  "128546": ":cry:",
  "128557": ":sob:",
  "128548": ":triumph:",
  "128544": ":angry:",
  "128545": ":rage:",
  "129324": ":cursing_face:",
  "129327": ":exploding_head:",
  "128563": ":flushed:",
  "129397": ":hot_face:",
  "129398": ":cold_face:",
  "128561": ":scream:",
  "128552": ":fearful:",
  "128560": ":cold_sweat:",
  "128549": ":disappointed_relieved:",
  "128531": ":sweat:",
  "129303": ":hugs:",
  "129300": ":thinking:",
  "129325": ":hand_over_mouth:",
  "129323": ":shushing_face:",
  "129317": ":lying_face:",
  "128566": ":no_mouth:",
  "128528": ":neutral_face:",
  "128529": ":expressionless:",
  "128556": ":grimacing:",
  "128580": ":roll_eyes:",
  "128559": ":hushed:",
  "128550": ":frowning:",
  "128551": ":anguished:",
  "128558": ":open_mouth:",
  "128562": ":astonished:",
  "129393": ":yawning_face:",
  "128564": ":sleeping:",
  "129316": ":drooling_face:",
  "128554": ":sleepy:",
  "128565": ":dizzy_face:",
  "129296": ":zipper_mouth_face:",
  "129396": ":woozy_face:",
  "129314": ":nauseated_face:",
  "129326": ":vomiting_face:",
  "129319": ":sneezing_face:",
  "128567": ":mask:",
  "129298": ":face_with_thermometer:",
  "129301": ":face_with_head_bandage:",
  "129297": ":money_mouth_face:",
  "129312": ":cowboy_hat_face:",
  "128520": ":smiling_imp:",
  "128127": ":imp:",
  "128121": ":japanese_ogre:",
  "128122": ":japanese_goblin:",
  "129313": ":clown_face:",
  "128169": ":poop:",
  "128123": ":ghost:",
  "128128": ":skull:",
  "9760": ":skull_and_crossbones:",
  "128125": ":alien:",
  "128126": ":space_invader:",
  "129302": ":robot:",
  "127875": ":jack_o_lantern:",
  "10084": ":heart:",
  "129505": ":orange_heart:",
  "128155": ":yellow_heart:",
  "128154": ":green_heart:",
  "128153": ":blue_heart:",
  "128156": ":purple_heart:",
  "128420": ":black_heart:",
  "129293": ":white_heart:",
  "129294": ":brown_heart:",
  "128148": ":broken_heart:",
  "10083": ":heart_exclamation:",
  "128149": ":two_hearts:",
  "128158": ":revolving_hearts:",
  "128147": ":heartbeat:",
  "128151": ":heartpulse:",
  "128150": ":sparkling_heart:",
  "128152": ":cupid:",
  "128157": ":gift_heart:",
  "128159": ":heart_decoration:",
  "128077": ":thumbsup:",
  "128078": ":thumbsdown:",
  "128076": ":ok_hand:",
  "9996": ":v:",
  "129310": ":crossed_fingers:",
  "129311": ":love_you_gesture:",
  "129304": ":metal:",
  "129305": ":call_me_hand:",
  "128072": ":point_left:",
  "128073": ":point_right:",
  "128070": ":point_up_2:",
  "128071": ":point_down:",
  "9757": ":point_up:",
  "128075": ":wave:",
  "9995": ":raised_hand:",
  "128079": ":clap:",
  "128588": ":raised_hands:",
  "128080": ":open_hands:",
  "129309": ":handshake:",
  "128591": ":pray:",
  "9997": ":writing_hand:",
  "128170": ":muscle:",
  "128293": ":fire:",
  "10024": ":sparkles:",
  "127775": ":star2:",
  "11088": ":star:",
  "128171": ":dizzy:",
  "128165": ":boom:",
  "128175": ":100:",
  "9888": ":warning:",
  "10071": ":exclamation:",
  "10067": ":question:",
  "128680": ":rotating_light:",
  "128240": ":newspaper:",
  "128478": ":newspaper_roll:",
  "128226": ":loudspeaker:",
  "128227": ":mega:",
  "128279": ":link:",
  "127757": ":earth_africa:",
  "127758": ":earth_americas:",
  "127759": ":earth_asia:",
  "127881": ":tada:",
  "127882": ":confetti_ball:",
  "9989": ":white_check_mark:",
  "10060": ":x:",
  "9940": ":no_entry:",
  "128683": ":no_entry_sign:",
  "128137": ":syringe:",
  "128138": ":pill:",
  "129440": ":microbe:",
  "129516": ":dna:",
  "128200": ":chart_with_upwards_trend:",
  "128201": ":chart_with_downwards_trend:",
  "128176": ":moneybag:",
  "128184": ":money_with_wings:",
  "128499": ":ballot_box:",
  "9878": ":balance_scale:",
  "128721": ":stop_sign:",
  "128248": ":camera_flash:",
  "128250": ":tv:",
  "128241": ":iphone:",
  "128187": ":computer:",
  "127760": ":globe_with_meridians:",
  "128064": ":eyes:"
};

export const STOPWORDS: ReadonlySet<string> = new Set([
  "a",
  "about",
  "above",
  "after",
  "again",
  "against",
  "all",
  "am",
  "an",
  "and",
  "any",
  "are",
  "as",
  "at",
  "be",
  "because",
  "been",
  "before",
  "being",
  "below",
  "between",
  "both",
  "but",
  "by",
  "can",
  "did",
  "do",
  "does",
  "doing",
  "down",
  "during",
  "each",
  "few",
  "for",
  "from",
  "further",
  "had",
  "has",
  "have",
  "having",
  "he",
  "her",
  "here",
  "hers",
  "him",
  "his",
  "how",
  "i",
  "if",
  "in",
  "into",
  "is",
  "it",
  "its",
  "just",
  "me",
  "more",
  "most",
  "my",
  "no",
  "nor",
  "not",
  "now",
  "of",
  "off",
  "on",
  "once",
  "only",
  "or",
  "other",
  "our",
  "out",
  "over",
  "own",
  "same",
  "she",
  "so",
  "some",
  "such",
  "than",
  "that",
  "the",
  "their",
  "them",
  "then",
  "there",
  "these",
  "they",
  "this",
  "those",
  "through",
  "to",
  "too",
  "under",
  "until",
  "up",
  "very",
  "was",
  "we",
  "were",
  "what",
  "when",
  "where",
  "which",
  "while",
  "who",
  "whom",
  "why",
  "will",
  "with",
  "you",
  "your"
]);
